#pragma once

#include <memory>
#include <vector>

#include "smacsim/smacsim.hpp"

namespace smacsim::testing {

// A fixed scenario with the given units and positions.
inline ScenarioSpec fixed_spec(Race race, std::vector<UnitType> allies, std::vector<UnitType> enemies,
                               std::vector<Vec2> ally_pos, std::vector<Vec2> enemy_pos, int limit = 100) {
  ScenarioSpec s;
  s.name = "test_fixed";
  s.race = RaceConfig::standard(race);
  s.n_allies = static_cast<int>(allies.size());
  s.n_enemies = static_cast<int>(enemies.size());
  s.team = TeamKind::fixed(std::move(allies), std::move(enemies));
  s.spawn = SpawnKind::fixed(std::move(ally_pos), std::move(enemy_pos));
  s.episode_limit = limit;
  s.validate();
  return s;
}

inline WorldState make_world(const ScenarioSpec& spec, std::uint64_t seed = 0,
                             std::shared_ptr<const StatTable> stats = nullptr) {
  if (!stats) stats = std::make_shared<const StatTable>(StatTable::defaults());
  return init_world(std::make_shared<const ScenarioInstance>(sample_instance(spec, seed)), stats, seed);
}

// A world built straight from types and positions, bypassing the scenario's
// race and team rules (for mixed-race duels).
inline WorldState raw_world(std::vector<UnitType> allies, std::vector<UnitType> enemies, std::vector<Vec2> ally_pos,
                            std::vector<Vec2> enemy_pos, int limit = 100) {
  ScenarioInstance inst;
  inst.spec = make_scenario(race_of(allies.front()), static_cast<int>(allies.size()), static_cast<int>(enemies.size()));
  inst.spec.episode_limit = limit;
  inst.ally_types = std::move(allies);
  inst.enemy_types = std::move(enemies);
  inst.ally_positions = std::move(ally_pos);
  inst.enemy_positions = std::move(enemy_pos);
  return init_world(std::make_shared<const ScenarioInstance>(std::move(inst)),
                    std::make_shared<const StatTable>(StatTable::defaults()), 0);
}

inline StepOptions idle_options(bool mask = true) {
  static const IdleOpponent idle;
  StepOptions o;
  o.opponent = &idle;
  o.avail_mask_enabled = mask;
  return o;
}

inline StepResult step_all(WorldState& w, const std::vector<Action>& acts, const StepOptions& opt) {
  return step(w, std::span<const Action>(acts), opt);
}

// The protoss 5v5 with one composition and mirrored line spawns.
inline ScenarioSpec fixed_protoss_5v5() {
  const std::vector<UnitType> team = {UnitType::stalker, UnitType::stalker, UnitType::zealot, UnitType::zealot,
                                      UnitType::stalker};
  std::vector<Vec2> al, en;
  for (int i = 0; i < 5; ++i) {
    al.push_back({10.0, 12.0 + 2.0 * i});
    en.push_back({22.0, 12.0 + 2.0 * i});
  }
  ScenarioSpec s = fixed_spec(Race::protoss, team, team, al, en);
  s.name = "protoss_5_vs_5_fixed";
  return s;
}

}  // namespace smacsim::testing
