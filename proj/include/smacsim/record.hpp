#pragma once

// Episode recording, line-delimited serialization, Monte-Carlo targets and
// replay verification.
//
// On disk an episode is one header line followed by one line per step:
//
//   {"type":"episode", "scenario":..., "instance":..., "seed":..., "stat_version":...,
//    "policy":..., "settings":..., "length":..., "won":..., "return":...}
//   {"type":"step", "t":..., "actions":[...], "reward":..., "terminated":...,
//    "won":..., "world_hash":..., "target":..., "obs":..., "state":..., "avail":..., "epo":...}
//
// Keys are written in sorted order; obs/state/avail/epo appear only when
// recorded. Several episodes may follow each other in one file.

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "smacsim/policy.hpp"

namespace smacsim {

struct RecordOptions {
  bool observations = false;
  bool state = false;
  bool avail = false;
  bool epo = false;
  double gamma = 0.99;

  static RecordOptions full() { return {true, true, true, true, 0.99}; }
};

struct StepRecord {
  int t = 0;
  std::vector<int> actions;
  double reward = 0.0;
  bool terminated = false;
  bool won = false;
  std::uint64_t world_hash = 0;  // world after the step
  double target = 0.0;
  // Observations and masks are the ones the policy saw before acting.
  std::vector<FeatureVector> obs;
  FeatureVector state;
  std::vector<std::vector<bool>> avail;
  nlohmann::json epo;  // null unless recorded and EPO is active
};

// Environment settings a replay needs beyond the instance itself.
struct EpisodeSettings {
  std::optional<double> epo_p;
  bool avail_mask = true;
  std::string opponent = "pursuit";
  RewardConfig reward;
  bool obs_last_action = false;

  nlohmann::json to_json() const {
    return {{"epo_p", epo_p ? nlohmann::json(*epo_p) : nlohmann::json(nullptr)},
            {"avail_mask", avail_mask},
            {"opponent", opponent},
            {"obs_last_action", obs_last_action},
            {"reward",
             {{"kill_bonus", reward.kill_bonus},
              {"win_bonus", reward.win_bonus},
              {"cap", reward.cap},
              {"damage_taken_weight", reward.damage_taken_weight}}}};
  }

  static EpisodeSettings from_json(const nlohmann::json& j) {
    EpisodeSettings s;
    if (j.contains("epo_p") && !j["epo_p"].is_null()) s.epo_p = j["epo_p"].get<double>();
    s.avail_mask = j.value("avail_mask", true);
    s.opponent = j.value("opponent", std::string("pursuit"));
    s.obs_last_action = j.value("obs_last_action", false);
    if (j.contains("reward")) {
      const auto& r = j["reward"];
      s.reward.kill_bonus = r.value("kill_bonus", s.reward.kill_bonus);
      s.reward.win_bonus = r.value("win_bonus", s.reward.win_bonus);
      s.reward.cap = r.value("cap", s.reward.cap);
      s.reward.damage_taken_weight = r.value("damage_taken_weight", s.reward.damage_taken_weight);
    }
    return s;
  }
};

struct EpisodeRecord {
  std::string scenario;
  ScenarioInstance instance;
  std::uint64_t seed = 0;
  std::string stat_version;
  std::string policy;
  EpisodeSettings settings;
  std::vector<StepRecord> steps;
  bool won = false;
  double total_return = 0.0;

  int length() const { return static_cast<int>(steps.size()); }
};

inline EpisodeSettings settings_of(const Env& env) {
  EpisodeSettings s;
  s.epo_p = env.spec().epo_p;
  s.avail_mask = env.avail_mask_enabled();
  s.opponent = env.config().opponent->name();
  s.reward = env.config().reward;
  s.obs_last_action = env.config().obs.last_action;
  return s;
}

// target_t = r_t + gamma * target_{t+1}, with the terminal target = r_T.
inline void assign_mc_targets(EpisodeRecord& rec, double gamma) {
  double g = 0.0;
  for (auto it = rec.steps.rbegin(); it != rec.steps.rend(); ++it) {
    g = it->reward + gamma * g;
    it->target = g;
  }
}

// Caller-supplied per-step targets (e.g. from a trained critic).
inline void assign_external_targets(EpisodeRecord& rec, const std::vector<double>& targets) {
  if (targets.size() != rec.steps.size())
    throw ConfigError("external targets: episode has " + std::to_string(rec.steps.size()) + " steps but " +
                      std::to_string(targets.size()) + " targets were supplied");
  for (std::size_t i = 0; i < targets.size(); ++i) rec.steps[i].target = targets[i];
}

// Plays one episode of `env`'s scenario from `seed`. The policy draws from
// its own stream, so policy randomness never perturbs the engine or EPO.
inline EpisodeRecord run_episode(Env& env, Policy& policy, std::uint64_t seed, const RecordOptions& opt = {}) {
  env.reset(seed);
  Rng rng(derive_seed(seed, Stream::policy));

  EpisodeRecord rec;
  rec.scenario = env.spec().name;
  rec.instance = env.instance();
  rec.seed = seed;
  rec.stat_version = env.config().stats->version;
  rec.policy = policy.name();
  rec.settings = settings_of(env);

  const int n = env.spec().n_allies;
  std::vector<int> ids(static_cast<std::size_t>(n));
  std::vector<std::vector<bool>> avail(static_cast<std::size_t>(n));
  int t = 0;
  while (!env.terminated()) {
    StepRecord s;
    s.t = t;
    for (int a = 0; a < n; ++a) avail[static_cast<std::size_t>(a)] = env.get_avail_agent_actions(a);
    if (opt.observations) s.obs = env.get_obs();
    if (opt.state) s.state = env.get_state();
    if (opt.avail) s.avail = avail;
    if (opt.epo && env.epo()) s.epo = env.epo()->to_json();
    for (int a = 0; a < n; ++a)
      ids[static_cast<std::size_t>(a)] = policy.act({env, a, t, avail[static_cast<std::size_t>(a)]}, rng);
    const StepResult r = env.step(std::span<const int>(ids));
    s.actions = ids;
    s.reward = r.reward;
    s.terminated = r.terminated;
    s.won = r.won;
    s.world_hash = world_hash(env.world());
    rec.total_return += r.reward;
    rec.won = r.won;
    rec.steps.push_back(std::move(s));
    ++t;
  }
  assign_mc_targets(rec, opt.gamma);
  return rec;
}

// ---------------------------------------------------------------------------
// Serialization

namespace detail {

inline nlohmann::json bool_matrix(const std::vector<std::vector<bool>>& m) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& row : m) {
    nlohmann::json r = nlohmann::json::array();
    for (bool b : row) r.push_back(b ? 1 : 0);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace detail

inline nlohmann::json header_json(const EpisodeRecord& rec) {
  return {{"type", "episode"},
          {"scenario", rec.scenario},
          {"instance", to_json(rec.instance)},
          {"seed", rec.seed},
          {"stat_version", rec.stat_version},
          {"policy", rec.policy},
          {"settings", rec.settings.to_json()},
          {"length", rec.length()},
          {"won", rec.won},
          {"return", rec.total_return}};
}

inline nlohmann::json step_json(const StepRecord& s) {
  nlohmann::json j = {{"type", "step"},         {"t", s.t},           {"actions", s.actions},
                      {"reward", s.reward},     {"terminated", s.terminated}, {"won", s.won},
                      {"world_hash", s.world_hash}, {"target", s.target}};
  if (!s.obs.empty()) j["obs"] = s.obs;
  if (!s.state.empty()) j["state"] = s.state;
  if (!s.avail.empty()) j["avail"] = detail::bool_matrix(s.avail);
  if (!s.epo.is_null()) j["epo"] = s.epo;
  return j;
}

inline void write_jsonl(std::ostream& os, const EpisodeRecord& rec) {
  os << header_json(rec).dump() << '\n';
  for (const auto& s : rec.steps) os << step_json(s).dump() << '\n';
}

inline std::string to_jsonl(const EpisodeRecord& rec) {
  std::ostringstream os;
  write_jsonl(os, rec);
  return os.str();
}

inline std::uint64_t record_hash(const EpisodeRecord& rec) { return fnv1a(to_jsonl(rec)); }

inline StepRecord step_from_json(const nlohmann::json& j) {
  StepRecord s;
  s.t = j.at("t").get<int>();
  s.actions = j.at("actions").get<std::vector<int>>();
  s.reward = j.at("reward").get<double>();
  s.terminated = j.at("terminated").get<bool>();
  s.won = j.at("won").get<bool>();
  s.world_hash = j.at("world_hash").get<std::uint64_t>();
  s.target = j.at("target").get<double>();
  if (j.contains("obs")) s.obs = j["obs"].get<std::vector<FeatureVector>>();
  if (j.contains("state")) s.state = j["state"].get<FeatureVector>();
  if (j.contains("avail"))
    for (const auto& row : j["avail"]) {
      std::vector<bool> r;
      for (const auto& b : row) r.push_back(b.get<int>() != 0);
      s.avail.push_back(std::move(r));
    }
  if (j.contains("epo")) s.epo = j["epo"];
  return s;
}

// Reads every episode in the stream. Malformed input throws ConfigError
// naming the line.
inline std::vector<EpisodeRecord> read_jsonl(std::istream& is) {
  std::vector<EpisodeRecord> out;
  std::string line;
  int lineno = 0;
  int pending = 0;
  auto fail = [&](const std::string& what) { throw ConfigError("line " + std::to_string(lineno) + ": " + what); };
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      fail(std::string("malformed record: ") + e.what());
    }
    try {
      const std::string type = j.value("type", "");
      if (type == "episode") {
        if (pending > 0) fail("episode header before the previous episode's steps ended");
        EpisodeRecord rec;
        rec.scenario = j.at("scenario").get<std::string>();
        rec.instance = instance_from_json(j.at("instance"));
        rec.seed = j.at("seed").get<std::uint64_t>();
        rec.stat_version = j.at("stat_version").get<std::string>();
        rec.policy = j.at("policy").get<std::string>();
        rec.settings = EpisodeSettings::from_json(j.at("settings"));
        rec.won = j.at("won").get<bool>();
        rec.total_return = j.at("return").get<double>();
        pending = j.at("length").get<int>();
        out.push_back(std::move(rec));
      } else if (type == "step") {
        if (pending <= 0) fail("step line without an episode header");
        out.back().steps.push_back(step_from_json(j));
        --pending;
      } else {
        fail("unknown record type '" + type + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      fail(std::string("bad field: ") + e.what());
    }
  }
  if (pending > 0) throw ConfigError("truncated episode: " + std::to_string(pending) + " step lines missing");
  return out;
}

// ---------------------------------------------------------------------------
// Replay

struct ReplayReport {
  bool ok = true;
  bool version_mismatch = false;
  std::optional<int> first_divergent_step;
  std::string message;

  nlohmann::json to_json() const {
    return {{"ok", ok},
            {"version_mismatch", version_mismatch},
            {"first_divergent_step", first_divergent_step ? nlohmann::json(*first_divergent_step) : nlohmann::json(nullptr)},
            {"message", message}};
  }
};

// Re-runs the recorded instance, seed and joint actions and compares rewards,
// outcomes, world hashes and whatever observations were recorded.
inline ReplayReport replay(const EpisodeRecord& rec, std::shared_ptr<const StatTable> stats = nullptr) {
  ReplayReport rep;
  EnvConfig cfg;
  if (stats) cfg.stats = std::move(stats);
  cfg.reward = rec.settings.reward;
  cfg.obs.last_action = rec.settings.obs_last_action;
  cfg.opponent = make_opponent(rec.settings.opponent);
  cfg.epo_p = rec.settings.epo_p;
  cfg.avail_mask = rec.settings.avail_mask;

  auto diverge = [&](int t, const std::string& what) {
    rep.ok = false;
    rep.first_divergent_step = t;
    rep.message = (rep.version_mismatch ? "stat table version mismatch (recorded " + rec.stat_version + ", replayed " +
                                              cfg.stats->version + "); "
                                        : std::string()) +
                  what + " differs at step " + std::to_string(t);
    return rep;
  };

  if (rec.stat_version != cfg.stats->version) {
    rep.version_mismatch = true;
    rep.ok = false;
    rep.message = "stat table version mismatch (recorded " + rec.stat_version + ", replayed " + cfg.stats->version + ")";
  }

  Env env(rec.instance.spec, cfg);
  env.reset(std::make_shared<const ScenarioInstance>(rec.instance), rec.seed);
  for (const StepRecord& s : rec.steps) {
    if (env.terminated()) return diverge(s.t, "episode length");
    if (!s.obs.empty() && env.get_obs() != s.obs) return diverge(s.t, "observation");
    if (!s.state.empty() && env.get_state() != s.state) return diverge(s.t, "state");
    if (!s.avail.empty() && env.get_avail_actions() != s.avail) return diverge(s.t, "available actions");
    if (!s.epo.is_null() && env.epo() && env.epo()->to_json() != s.epo) return diverge(s.t, "EPO verdicts");
    StepResult r;
    try {
      r = env.step(std::span<const int>(s.actions));
    } catch (const std::exception& e) {
      return diverge(s.t, std::string("action rejected (") + e.what() + "); step");
    }
    if (world_hash(env.world()) != s.world_hash) return diverge(s.t, "world state");
    if (r.reward != s.reward) return diverge(s.t, "reward");
    if (r.terminated != s.terminated || r.won != s.won) return diverge(s.t, "outcome");
  }
  if (!env.terminated()) return diverge(rec.length(), "episode length");
  if (rep.version_mismatch) rep.message += "; trajectory otherwise reproduced";
  return rep;
}

}  // namespace smacsim
