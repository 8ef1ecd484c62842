#pragma once

// SMAC-style environment handle: reset / step / get_obs / get_state /
// get_avail_actions / get_env_info over one scenario. One handle per episode
// stream; handles share no mutable state.

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "smacsim/engine.hpp"
#include "smacsim/epo.hpp"
#include "smacsim/observation.hpp"
#include "smacsim/scenario.hpp"

namespace smacsim {

struct EnvConfig {
  std::shared_ptr<const StatTable> stats = std::make_shared<const StatTable>(StatTable::defaults());
  RewardConfig reward;
  ObsConfig obs;
  std::shared_ptr<const Opponent> opponent = std::make_shared<const PursuitOpponent>();
  // Overrides applied on top of the scenario spec.
  std::optional<std::optional<double>> epo_p;  // outer: override given; inner nullopt: disable EPO
  std::optional<bool> avail_mask;
};

struct EnvInfo {
  int n_agents = 0;
  int n_enemies = 0;
  int n_actions = 0;
  int obs_shape = 0;
  int state_shape = 0;
  int episode_limit = 0;

  nlohmann::json to_json() const {
    return {{"n_agents", n_agents},     {"n_enemies", n_enemies},     {"n_actions", n_actions},
            {"obs_shape", obs_shape},   {"state_shape", state_shape}, {"episode_limit", episode_limit}};
  }
};

class Env {
 public:
  explicit Env(ScenarioSpec spec, EnvConfig cfg = {}) : spec_(std::move(spec)), cfg_(std::move(cfg)) {
    if (cfg_.epo_p) spec_.epo_p = *cfg_.epo_p;
    if (cfg_.avail_mask) spec_.avail_mask_enabled = *cfg_.avail_mask;
    spec_.validate();
    if (!cfg_.opponent) cfg_.opponent = std::make_shared<const PursuitOpponent>();
  }

  // Samples a fresh instance of the scenario from `seed`.
  void reset(std::uint64_t seed) { reset(std::make_shared<const ScenarioInstance>(sample_instance(spec_, seed)), seed); }

  // Replays a given instance; its spec's EPO and mask settings are replaced by
  // this handle's.
  void reset(std::shared_ptr<const ScenarioInstance> inst, std::uint64_t seed) {
    if (static_cast<int>(inst->ally_types.size()) != spec_.n_allies ||
        static_cast<int>(inst->enemy_types.size()) != spec_.n_enemies)
      throw ScenarioError("instance unit counts do not match the scenario");
    instance_ = std::move(inst);
    seed_ = seed;
    world_ = init_world(instance_, cfg_.stats, seed);
    epo_.reset();
    if (spec_.epo_p) {
      epo_.emplace(*spec_.epo_p, world_.n_allies, world_.n_enemies, seed);
      epo_->update(world_);
    }
  }

  StepResult step(std::span<const Action> actions) {
    require_reset();
    StepOptions opt;
    opt.avail_mask_enabled = spec_.avail_mask_enabled;
    opt.opponent = cfg_.opponent.get();
    opt.epo = epo_ ? &*epo_ : nullptr;
    opt.reward = cfg_.reward;
    StepResult r = smacsim::step(world_, actions, opt);
    if (epo_) epo_->update(world_);
    return r;
  }

  StepResult step(std::span<const int> action_ids) {
    require_reset();
    if (static_cast<int>(action_ids.size()) != world_.n_allies)
      throw ActionError("expected " + std::to_string(world_.n_allies) + " actions, got " +
                        std::to_string(action_ids.size()));
    const ActionSpace space = world_.action_space(Team::ally);
    std::vector<Action> acts;
    acts.reserve(action_ids.size());
    for (int id : action_ids) acts.push_back(space.decode(id));
    return step(std::span<const Action>(acts));
  }

  FeatureVector get_obs_agent(int agent) const {
    require_reset();
    return build_observation(world_, agent, epo(), cfg_.obs);
  }

  std::vector<FeatureVector> get_obs() const {
    std::vector<FeatureVector> out;
    for (int i = 0; i < spec_.n_allies; ++i) out.push_back(get_obs_agent(i));
    return out;
  }

  FeatureVector get_state() const {
    require_reset();
    return build_state(world_);
  }

  // With the mask enforced this is the legality mask. Without it (EPO maps)
  // agents get no targeting information: every action except no_op is
  // offered to living agents and illegal choices become no-ops.
  std::vector<bool> get_avail_agent_actions(int agent) const {
    require_reset();
    if (spec_.avail_mask_enabled) return available_actions(world_, agent, epo());
    std::vector<bool> mask(static_cast<std::size_t>(n_actions()), world_.ally(agent).alive);
    mask[0] = !world_.ally(agent).alive;
    return mask;
  }

  std::vector<std::vector<bool>> get_avail_actions() const {
    std::vector<std::vector<bool>> out;
    for (int i = 0; i < spec_.n_allies; ++i) out.push_back(get_avail_agent_actions(i));
    return out;
  }

  EnvInfo get_env_info() const {
    const LayoutDims d{spec_.n_allies, spec_.n_enemies, cfg_.obs.last_action};
    return {spec_.n_allies, spec_.n_enemies, d.n_actions(), d.obs_size(), d.state_size(), spec_.episode_limit};
  }

  FeatureLayout obs_layout() const { return observation_layout({spec_.n_allies, spec_.n_enemies, cfg_.obs.last_action}); }
  FeatureLayout state_layout() const { return smacsim::state_layout({spec_.n_allies, spec_.n_enemies, false}); }

  int n_actions() const { return ActionSpace{spec_.n_enemies, spec_.n_allies}.size(); }
  bool avail_mask_enabled() const { return spec_.avail_mask_enabled; }
  const ScenarioSpec& spec() const { return spec_; }
  const EnvConfig& config() const { return cfg_; }
  const WorldState& world() const { return world_; }
  const EpoTable* epo() const { return epo_ ? &*epo_ : nullptr; }
  const ScenarioInstance& instance() const { return *instance_; }
  std::shared_ptr<const ScenarioInstance> instance_ptr() const { return instance_; }
  std::uint64_t seed() const { return seed_; }
  bool terminated() const { return world_.terminated; }

 private:
  void require_reset() const {
    if (!instance_) throw ScenarioError("environment used before reset()");
  }

  ScenarioSpec spec_;
  EnvConfig cfg_;
  std::shared_ptr<const ScenarioInstance> instance_;
  std::uint64_t seed_ = 0;
  WorldState world_;
  std::optional<EpoTable> epo_;
};

}  // namespace smacsim
