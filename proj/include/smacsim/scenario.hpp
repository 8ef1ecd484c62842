#pragma once

// Procedural scenario generation: team compositions drawn per race, reflect and
// surround start positions, the named scenario registry, and a registry of
// user-supplied samplers that scenarios can reference by name.

#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "smacsim/errors.hpp"
#include "smacsim/geometry.hpp"
#include "smacsim/json_util.hpp"
#include "smacsim/rng.hpp"
#include "smacsim/units.hpp"

namespace smacsim {

struct RaceConfig {
  Race race = Race::protoss;
  std::vector<std::pair<UnitType, double>> unit_probs;

  // 0.45 for each regular unit, 0.10 for the special unit.
  static RaceConfig standard(Race r) {
    const auto units = race_units(r);
    return {r, {{units[0], 0.45}, {units[1], 0.45}, {units[2], 0.10}}};
  }

  void validate() const {
    if (unit_probs.empty()) throw ConfigError("race config has no unit types");
    double sum = 0.0;
    for (const auto& [type, p] : unit_probs) {
      if (race_of(type) != race)
        throw ConfigError("unit type '" + std::string(to_string(type)) + "' does not belong to race " +
                          std::string(to_string(race)));
      if (!(p >= 0.0)) throw ConfigError("negative unit probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("unit probabilities must sum to 1");
  }
};

struct SpawnKind {
  enum class Kind { reflect, surround, mixed, fixed, custom };
  Kind kind = Kind::reflect;
  std::vector<Vec2> ally_positions;   // fixed only
  std::vector<Vec2> enemy_positions;  // fixed only
  std::string custom;                 // name in the DistributionRegistry

  static SpawnKind reflect() { return {Kind::reflect, {}, {}, {}}; }
  static SpawnKind surround() { return {Kind::surround, {}, {}, {}}; }
  // Reflect or surround with equal probability, decided per episode.
  static SpawnKind mixed() { return {Kind::mixed, {}, {}, {}}; }
  static SpawnKind fixed(std::vector<Vec2> allies, std::vector<Vec2> enemies) {
    return {Kind::fixed, std::move(allies), std::move(enemies), {}};
  }
  static SpawnKind named(std::string name) { return {Kind::custom, {}, {}, std::move(name)}; }
};

struct TeamKind {
  enum class Kind { random, fixed, custom };
  Kind kind = Kind::random;
  std::vector<UnitType> ally_types;   // fixed only
  std::vector<UnitType> enemy_types;  // fixed only
  std::string custom;

  static TeamKind random() { return {}; }
  static TeamKind fixed(std::vector<UnitType> allies, std::vector<UnitType> enemies) {
    return {Kind::fixed, std::move(allies), std::move(enemies), {}};
  }
  static TeamKind named(std::string name) { return {Kind::custom, {}, {}, std::move(name)}; }
};

struct SpawnGeometry {
  double margin = 1.0;
  double min_separation = 1.0;
  int max_attempts = 1000;
  // Surround constants, as fractions of the map width.
  double surround_ally_radius = 1.0 / 8.0;
  double surround_enemy_min_radius = 1.0 / 4.0;
  double surround_enemy_max_radius = 3.0 / 8.0;
  // Half-width of the band around each diagonal; a bare ray cannot hold
  // large teams at the minimum separation.
  double surround_enemy_spread = 1.0 / 16.0;
};

struct ScenarioSpec {
  std::string name;
  RaceConfig race = RaceConfig::standard(Race::protoss);
  int n_allies = 5;
  int n_enemies = 5;
  SpawnKind spawn = SpawnKind::reflect();
  TeamKind team = TeamKind::random();
  std::optional<double> epo_p;  // nullopt: EPO disabled
  bool avail_mask_enabled = true;
  double map_width = 32.0;
  double map_height = 32.0;
  int episode_limit = 100;
  SpawnGeometry geometry;

  void validate() const {
    const std::string where = "scenario '" + name + "': ";
    if (n_allies <= 0 || n_enemies <= 0) throw ConfigError(where + "unit counts must be positive");
    if (!(map_width > 0.0) || !(map_height > 0.0)) throw ConfigError(where + "map dimensions must be positive");
    if (episode_limit <= 0) throw ConfigError(where + "episode_limit must be positive");
    if (epo_p && !(*epo_p >= 0.0 && *epo_p <= 1.0)) throw ConfigError(where + "epo_p must lie in [0, 1]");
    race.validate();
    if (spawn.kind == SpawnKind::Kind::fixed) {
      if (static_cast<int>(spawn.ally_positions.size()) != n_allies ||
          static_cast<int>(spawn.enemy_positions.size()) != n_enemies)
        throw ConfigError(where + "fixed spawn position counts do not match unit counts");
      for (const auto* list : {&spawn.ally_positions, &spawn.enemy_positions})
        for (const Vec2& p : *list)
          if (!inside_map(p, map_width, map_height)) throw ConfigError(where + "fixed spawn position outside map");
    }
    if (team.kind == TeamKind::Kind::fixed) {
      if (static_cast<int>(team.ally_types.size()) != n_allies ||
          static_cast<int>(team.enemy_types.size()) != n_enemies)
        throw ConfigError(where + "fixed team sizes do not match unit counts");
      for (const auto* list : {&team.ally_types, &team.enemy_types})
        for (UnitType t : *list)
          if (race_of(t) != race.race) throw ConfigError(where + "fixed team mixes races");
    }
  }
};

struct ScenarioInstance {
  ScenarioSpec spec;
  std::vector<UnitType> ally_types;
  std::vector<UnitType> enemy_types;
  std::vector<Vec2> ally_positions;
  std::vector<Vec2> enemy_positions;
  std::uint64_t seed = 0;
};

struct SpawnPositions {
  std::vector<Vec2> allies;
  std::vector<Vec2> enemies;
};

struct Teams {
  std::vector<UnitType> allies;
  std::vector<UnitType> enemies;
};

// ---------------------------------------------------------------------------
// Team sampling

inline UnitType sample_unit(const RaceConfig& race, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (const auto& [type, p] : race.unit_probs) {
    acc += p;
    if (u < acc) return type;
  }
  // u landed in the rounding gap above the final cumulative sum.
  for (auto it = race.unit_probs.rbegin(); it != race.unit_probs.rend(); ++it)
    if (it->second > 0.0) return it->first;
  return race.unit_probs.back().first;
}

// i.i.d. draws; there is no separate train/test distribution.
inline std::vector<UnitType> sample_team(const RaceConfig& race, int n, Rng& rng) {
  if (n <= 0) throw ScenarioError("team size must be positive");
  std::vector<UnitType> team;
  team.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) team.push_back(sample_unit(race, rng));
  return team;
}

// The enemy team copies the ally team and appends i.i.d. extras.
inline std::vector<UnitType> sample_enemy_team(const std::vector<UnitType>& ally_types, int n_enemies,
                                               const RaceConfig& race, Rng& rng) {
  if (n_enemies < static_cast<int>(ally_types.size()))
    throw ScenarioError("enemy team cannot be smaller than the ally team");
  std::vector<UnitType> enemies = ally_types;
  while (static_cast<int>(enemies.size()) < n_enemies) enemies.push_back(sample_unit(race, rng));
  return enemies;
}

// ---------------------------------------------------------------------------
// Start positions

namespace detail {

inline bool separated(Vec2 p, const std::vector<Vec2>& placed, double min_sep) {
  for (const Vec2& q : placed)
    if (distance(p, q) < min_sep) return false;
  return true;
}

// Rejection sampling; `draw` returns nullopt for a candidate it rejects itself.
template <typename Draw>
Vec2 place_one(Draw&& draw, const std::vector<Vec2>& a, const std::vector<Vec2>& b, const SpawnGeometry& g,
               const char* what) {
  for (int attempt = 0; attempt < g.max_attempts; ++attempt) {
    const std::optional<Vec2> p = draw();
    if (p && separated(*p, a, g.min_separation) && separated(*p, b, g.min_separation)) return *p;
  }
  throw ScenarioError(std::string("could not place ") + what + " with the required separation after " +
                      std::to_string(g.max_attempts) + " attempts");
}

inline SpawnPositions reflect_positions(int n_allies, int n_enemies, double width, double height,
                                        const SpawnGeometry& g, Rng& rng) {
  const double half = width / 2.0;
  const double x_lo = g.margin;
  const double x_hi = half - g.min_separation / 2.0;
  const double y_lo = g.margin;
  const double y_hi = height - g.margin;
  if (!(x_hi > x_lo) || !(y_hi > y_lo)) throw ScenarioError("map too small for reflect spawns");

  SpawnPositions out;
  const int mirrored = std::min(n_allies, n_enemies);
  for (int i = 0; i < n_allies; ++i) {
    const Vec2 p = place_one([&] { return std::optional<Vec2>({rng.uniform(x_lo, x_hi), rng.uniform(y_lo, y_hi)}); }, out.allies, {}, g,
                             "ally");
    out.allies.push_back(p);
    if (i < mirrored) out.enemies.push_back({width - p.x, p.y});
  }
  // Asymmetric extras go on the enemy half.
  for (int i = mirrored; i < n_enemies; ++i) {
    const Vec2 p = place_one([&] { return std::optional<Vec2>({rng.uniform(width - x_hi, width - x_lo), rng.uniform(y_lo, y_hi)});
                             },
                             out.enemies, {}, g, "enemy");
    out.enemies.push_back(p);
  }
  return out;
}

inline SpawnPositions surround_positions(int n_allies, int n_enemies, double width, double height,
                                         const SpawnGeometry& g, Rng& rng) {
  const Vec2 center{width / 2.0, height / 2.0};
  const double ally_radius = width * g.surround_ally_radius;
  const double r_lo = width * g.surround_enemy_min_radius;
  const double r_hi = width * g.surround_enemy_max_radius;
  const double spread = width * g.surround_enemy_spread;
  constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;
  const Vec2 diagonals[4] = {{kInvSqrt2, kInvSqrt2}, {-kInvSqrt2, kInvSqrt2}, {-kInvSqrt2, -kInvSqrt2},
                             {kInvSqrt2, -kInvSqrt2}};

  SpawnPositions out;
  for (int i = 0; i < n_allies; ++i) {
    const Vec2 p = place_one(
        [&] {
          const double r = ally_radius * std::sqrt(rng.uniform());
          const double theta = 2.0 * std::numbers::pi * rng.uniform();
          return std::optional<Vec2>(center + Vec2{r * std::cos(theta), r * std::sin(theta)});
        },
        out.allies, {}, g, "ally");
    out.allies.push_back(p);
  }
  for (int i = 0; i < n_enemies; ++i) {
    const Vec2 dir = diagonals[i % 4];
    const Vec2 p = place_one(
        [&] {
          const Vec2 side{-dir.y, dir.x};
          const Vec2 q = center + dir * rng.uniform(r_lo, r_hi) + side * rng.uniform(-spread, spread);
          return inside_map(q, width, height) ? std::optional<Vec2>(q) : std::nullopt;
        },
        out.enemies, out.allies, g, "enemy");
    out.enemies.push_back(p);
  }
  return out;
}

}  // namespace detail

// Built-in kinds only; custom kinds go through sample_instance, which has the
// registry.
inline SpawnPositions sample_positions(const SpawnKind& kind, int n_allies, int n_enemies, double width,
                                       double height, const SpawnGeometry& geometry, Rng& rng) {
  if (n_allies <= 0 || n_enemies <= 0) throw ScenarioError("unit counts must be positive");
  switch (kind.kind) {
    case SpawnKind::Kind::reflect:
      return detail::reflect_positions(n_allies, n_enemies, width, height, geometry, rng);
    case SpawnKind::Kind::surround:
      return detail::surround_positions(n_allies, n_enemies, width, height, geometry, rng);
    case SpawnKind::Kind::mixed:
      if (rng.bernoulli(0.5)) return detail::reflect_positions(n_allies, n_enemies, width, height, geometry, rng);
      return detail::surround_positions(n_allies, n_enemies, width, height, geometry, rng);
    case SpawnKind::Kind::fixed:
      return {kind.ally_positions, kind.enemy_positions};
    case SpawnKind::Kind::custom:
      break;
  }
  throw ScenarioError("custom spawn kind '" + kind.custom + "' needs a distribution registry");
}

// ---------------------------------------------------------------------------
// User-supplied distributions

using SpawnSampler = std::function<SpawnPositions(const ScenarioSpec&, Rng&)>;
using TeamSampler = std::function<Teams(const ScenarioSpec&, Rng&)>;

// Samplers must be pure functions of (spec, rng). Registration is
// thread-safe; names are unique per kind.
class DistributionRegistry {
 public:
  void register_spawn(const std::string& name, SpawnSampler sampler) {
    std::lock_guard lock(mutex_);
    if (!spawns_.emplace(name, std::move(sampler)).second)
      throw ConfigError("spawn distribution '" + name + "' is already registered");
  }

  void register_team(const std::string& name, TeamSampler sampler) {
    std::lock_guard lock(mutex_);
    if (!teams_.emplace(name, std::move(sampler)).second)
      throw ConfigError("team distribution '" + name + "' is already registered");
  }

  SpawnSampler spawn(const std::string& name) const {
    std::lock_guard lock(mutex_);
    auto it = spawns_.find(name);
    if (it == spawns_.end()) throw ConfigError("unknown spawn distribution '" + name + "'");
    return it->second;
  }

  TeamSampler team(const std::string& name) const {
    std::lock_guard lock(mutex_);
    auto it = teams_.find(name);
    if (it == teams_.end()) throw ConfigError("unknown team distribution '" + name + "'");
    return it->second;
  }

  bool has_spawn(const std::string& name) const {
    std::lock_guard lock(mutex_);
    return spawns_.contains(name);
  }

  static DistributionRegistry& global() {
    static DistributionRegistry instance;
    return instance;
  }

 private:
  mutable std::mutex mutex_;
  std::map<std::string, SpawnSampler> spawns_;
  std::map<std::string, TeamSampler> teams_;
};

// Draws one episode setup. Teams are drawn before positions, both from the
// scenario stream of `seed`.
inline ScenarioInstance sample_instance(const ScenarioSpec& spec, std::uint64_t seed,
                                        const DistributionRegistry& registry = DistributionRegistry::global()) {
  spec.validate();
  Rng rng(derive_seed(seed, Stream::scenario));
  ScenarioInstance inst;
  inst.spec = spec;
  inst.seed = seed;

  switch (spec.team.kind) {
    case TeamKind::Kind::random:
      if (spec.n_enemies >= spec.n_allies) {
        inst.ally_types = sample_team(spec.race, spec.n_allies, rng);
        inst.enemy_types = sample_enemy_team(inst.ally_types, spec.n_enemies, spec.race, rng);
      } else {
        // More allies than enemies (the EPO maps): the ally team is the one
        // that carries the extra draws.
        inst.enemy_types = sample_team(spec.race, spec.n_enemies, rng);
        inst.ally_types = sample_enemy_team(inst.enemy_types, spec.n_allies, spec.race, rng);
      }
      break;
    case TeamKind::Kind::fixed:
      inst.ally_types = spec.team.ally_types;
      inst.enemy_types = spec.team.enemy_types;
      break;
    case TeamKind::Kind::custom: {
      Teams t = registry.team(spec.team.custom)(spec, rng);
      inst.ally_types = std::move(t.allies);
      inst.enemy_types = std::move(t.enemies);
      break;
    }
  }

  SpawnPositions pos = spec.spawn.kind == SpawnKind::Kind::custom
                           ? registry.spawn(spec.spawn.custom)(spec, rng)
                           : sample_positions(spec.spawn, spec.n_allies, spec.n_enemies, spec.map_width,
                                              spec.map_height, spec.geometry, rng);
  inst.ally_positions = std::move(pos.allies);
  inst.enemy_positions = std::move(pos.enemies);

  if (static_cast<int>(inst.ally_types.size()) != spec.n_allies ||
      static_cast<int>(inst.enemy_types.size()) != spec.n_enemies ||
      static_cast<int>(inst.ally_positions.size()) != spec.n_allies ||
      static_cast<int>(inst.enemy_positions.size()) != spec.n_enemies)
    throw ScenarioError("scenario '" + spec.name + "': sampler returned the wrong number of units");
  return inst;
}

// ---------------------------------------------------------------------------
// Registry

inline int default_episode_limit(int n_allies) {
  if (n_allies <= 6) return 100;
  if (n_allies <= 10) return 150;
  return 200;
}

inline ScenarioSpec make_scenario(Race race, int n_allies, int n_enemies) {
  ScenarioSpec s;
  s.name = std::string(to_string(race)) + "_" + std::to_string(n_allies) + "_vs_" + std::to_string(n_enemies);
  s.race = RaceConfig::standard(race);
  s.n_allies = n_allies;
  s.n_enemies = n_enemies;
  s.spawn = SpawnKind::mixed();
  s.episode_limit = default_episode_limit(n_allies);
  return s;
}

// The fifteen generated scenarios plus the three 6-vs-5 EPO scenarios.
inline const std::vector<ScenarioSpec>& registry() {
  static const std::vector<ScenarioSpec> specs = [] {
    std::vector<ScenarioSpec> out;
    constexpr std::pair<int, int> kSizes[] = {{5, 5}, {10, 10}, {20, 20}, {10, 11}, {20, 23}};
    for (Race race : {Race::protoss, Race::terran, Race::zerg})
      for (auto [a, e] : kSizes) out.push_back(make_scenario(race, a, e));
    for (Race race : {Race::protoss, Race::terran, Race::zerg}) {
      ScenarioSpec s = make_scenario(race, 6, 5);
      s.name = "epo_" + s.name;
      s.epo_p = 0.0;
      s.avail_mask_enabled = false;
      out.push_back(std::move(s));
    }
    return out;
  }();
  return specs;
}

inline const ScenarioSpec& find_scenario(const std::string& name) {
  for (const auto& s : registry())
    if (s.name == name) return s;
  throw ConfigError("unknown scenario '" + name + "'");
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json positions_to_json(const std::vector<Vec2>& ps) {
  nlohmann::json arr = nlohmann::json::array();
  for (Vec2 p : ps) arr.push_back(nlohmann::json::array({p.x, p.y}));
  return arr;
}

inline nlohmann::json types_to_json(const std::vector<UnitType>& ts) {
  nlohmann::json arr = nlohmann::json::array();
  for (UnitType t : ts) arr.push_back(std::string(to_string(t)));
  return arr;
}

inline nlohmann::json to_json(const ScenarioSpec& s) {
  nlohmann::json probs = nlohmann::json::object();
  for (const auto& [t, p] : s.race.unit_probs) probs[std::string(to_string(t))] = p;
  nlohmann::json spawn;
  switch (s.spawn.kind) {
    case SpawnKind::Kind::reflect: spawn = {{"kind", "reflect"}}; break;
    case SpawnKind::Kind::surround: spawn = {{"kind", "surround"}}; break;
    case SpawnKind::Kind::mixed: spawn = {{"kind", "mixed"}}; break;
    case SpawnKind::Kind::fixed:
      spawn = {{"kind", "fixed"},
               {"allies", positions_to_json(s.spawn.ally_positions)},
               {"enemies", positions_to_json(s.spawn.enemy_positions)}};
      break;
    case SpawnKind::Kind::custom: spawn = {{"kind", "custom"}, {"name", s.spawn.custom}}; break;
  }
  nlohmann::json team;
  switch (s.team.kind) {
    case TeamKind::Kind::random: team = {{"kind", "random"}}; break;
    case TeamKind::Kind::fixed:
      team = {{"kind", "fixed"}, {"allies", types_to_json(s.team.ally_types)},
              {"enemies", types_to_json(s.team.enemy_types)}};
      break;
    case TeamKind::Kind::custom: team = {{"kind", "custom"}, {"name", s.team.custom}}; break;
  }
  return {{"name", s.name},
          {"race", std::string(to_string(s.race.race))},
          {"unit_probs", probs},
          {"n_allies", s.n_allies},
          {"n_enemies", s.n_enemies},
          {"spawn", spawn},
          {"team", team},
          {"epo_p", s.epo_p ? nlohmann::json(*s.epo_p) : nlohmann::json(nullptr)},
          {"avail_mask", s.avail_mask_enabled},
          {"map", {s.map_width, s.map_height}},
          {"episode_limit", s.episode_limit},
          {"geometry",
           {{"margin", s.geometry.margin},
            {"min_separation", s.geometry.min_separation},
            {"max_attempts", s.geometry.max_attempts},
            {"surround_ally_radius", s.geometry.surround_ally_radius},
            {"surround_enemy_min_radius", s.geometry.surround_enemy_min_radius},
            {"surround_enemy_max_radius", s.geometry.surround_enemy_max_radius},
            {"surround_enemy_spread", s.geometry.surround_enemy_spread}}}};
}

namespace detail {

inline std::vector<Vec2> positions_from_json(const nlohmann::json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError("field " + path + ": expected an array of [x, y]");
  std::vector<Vec2> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& p = j[i];
    const std::string ip = path + "[" + std::to_string(i) + "]";
    if (!p.is_array() || p.size() != 2) throw ConfigError("field " + ip + ": expected [x, y]");
    out.push_back({read_json<double>(p[0], ip + "[0]"), read_json<double>(p[1], ip + "[1]")});
  }
  return out;
}

inline std::vector<UnitType> types_from_json(const nlohmann::json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError("field " + path + ": expected an array of unit type names");
  std::vector<UnitType> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(parse_unit_type(read_json<std::string>(j[i], path + "[" + std::to_string(i) + "]")));
  return out;
}

}  // namespace detail

// Fields not present keep the defaults of `base` (a registry entry when the
// config names one via "base").
inline ScenarioSpec scenario_from_json(const nlohmann::json& j, const std::string& path = "scenario") {
  using detail::read_json;
  if (!j.is_object()) throw ConfigError("field " + path + ": expected an object");
  ScenarioSpec s;
  if (j.contains("base")) s = find_scenario(read_json<std::string>(j["base"], path + ".base"));
  for (const auto& [key, v] : j.items()) {
    const std::string p = path + "." + key;
    if (key == "base") continue;
    if (key == "name") s.name = read_json<std::string>(v, p);
    else if (key == "race") {
      s.race = RaceConfig::standard(parse_race(read_json<std::string>(v, p)));
    } else if (key == "unit_probs") continue;  // applied after race
    else if (key == "n_allies") s.n_allies = read_json<int>(v, p);
    else if (key == "n_enemies") s.n_enemies = read_json<int>(v, p);
    else if (key == "epo_p") s.epo_p = v.is_null() ? std::nullopt : std::optional<double>(read_json<double>(v, p));
    else if (key == "avail_mask") s.avail_mask_enabled = read_json<bool>(v, p);
    else if (key == "episode_limit") s.episode_limit = read_json<int>(v, p);
    else if (key == "map") {
      if (!v.is_array() || v.size() != 2) throw ConfigError("field " + p + ": expected [width, height]");
      s.map_width = read_json<double>(v[0], p + "[0]");
      s.map_height = read_json<double>(v[1], p + "[1]");
    } else if (key == "spawn") {
      if (!v.is_object() || !v.contains("kind")) throw ConfigError("field " + p + ": expected {\"kind\": ...}");
      const auto kind = read_json<std::string>(v["kind"], p + ".kind");
      if (kind == "reflect") s.spawn = SpawnKind::reflect();
      else if (kind == "surround") s.spawn = SpawnKind::surround();
      else if (kind == "mixed") s.spawn = SpawnKind::mixed();
      else if (kind == "fixed")
        s.spawn = SpawnKind::fixed(detail::positions_from_json(v.value("allies", nlohmann::json()), p + ".allies"),
                                   detail::positions_from_json(v.value("enemies", nlohmann::json()), p + ".enemies"));
      else if (kind == "custom")
        s.spawn = SpawnKind::named(read_json<std::string>(v.value("name", nlohmann::json()), p + ".name"));
      else throw ConfigError("field " + p + ".kind: unknown spawn kind '" + kind + "'");
    } else if (key == "team") {
      if (!v.is_object() || !v.contains("kind")) throw ConfigError("field " + p + ": expected {\"kind\": ...}");
      const auto kind = read_json<std::string>(v["kind"], p + ".kind");
      if (kind == "random") s.team = TeamKind::random();
      else if (kind == "fixed")
        s.team = TeamKind::fixed(detail::types_from_json(v.value("allies", nlohmann::json()), p + ".allies"),
                                 detail::types_from_json(v.value("enemies", nlohmann::json()), p + ".enemies"));
      else if (kind == "custom")
        s.team = TeamKind::named(read_json<std::string>(v.value("name", nlohmann::json()), p + ".name"));
      else throw ConfigError("field " + p + ".kind: unknown team kind '" + kind + "'");
    } else if (key == "geometry") {
      if (!v.is_object()) throw ConfigError("field " + p + ": expected an object");
      for (const auto& [gk, gv] : v.items()) {
        const std::string gp = p + "." + gk;
        if (gk == "margin") s.geometry.margin = read_json<double>(gv, gp);
        else if (gk == "min_separation") s.geometry.min_separation = read_json<double>(gv, gp);
        else if (gk == "max_attempts") s.geometry.max_attempts = read_json<int>(gv, gp);
        else if (gk == "surround_ally_radius") s.geometry.surround_ally_radius = read_json<double>(gv, gp);
        else if (gk == "surround_enemy_min_radius") s.geometry.surround_enemy_min_radius = read_json<double>(gv, gp);
        else if (gk == "surround_enemy_max_radius") s.geometry.surround_enemy_max_radius = read_json<double>(gv, gp);
        else if (gk == "surround_enemy_spread") s.geometry.surround_enemy_spread = read_json<double>(gv, gp);
        else throw ConfigError("unknown field " + gp);
      }
    } else {
      throw ConfigError("unknown field " + p);
    }
  }
  if (j.contains("unit_probs")) {
    const auto& v = j["unit_probs"];
    const std::string p = path + ".unit_probs";
    if (!v.is_object()) throw ConfigError("field " + p + ": expected an object");
    s.race.unit_probs.clear();
    for (const auto& [uname, pv] : v.items()) s.race.unit_probs.emplace_back(parse_unit_type(uname), read_json<double>(pv, p + "." + uname));
  }
  if (s.name.empty()) throw ConfigError("field " + path + ".name: missing");
  try {
    s.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(e.what()) + " (at " + path + ")");
  }
  return s;
}

inline nlohmann::json to_json(const ScenarioInstance& inst) {
  return {{"spec", to_json(inst.spec)},
          {"seed", inst.seed},
          {"ally_types", types_to_json(inst.ally_types)},
          {"enemy_types", types_to_json(inst.enemy_types)},
          {"ally_positions", positions_to_json(inst.ally_positions)},
          {"enemy_positions", positions_to_json(inst.enemy_positions)}};
}

inline ScenarioInstance instance_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("scenario instance: expected an object");
  auto field = [&](const char* key) -> const nlohmann::json& {
    if (!j.contains(key)) throw ConfigError(std::string("field instance.") + key + ": missing");
    return j[key];
  };
  ScenarioInstance inst;
  inst.spec = scenario_from_json(field("spec"), "instance.spec");
  inst.seed = detail::read_json<std::uint64_t>(field("seed"), "instance.seed");
  inst.ally_types = detail::types_from_json(field("ally_types"), "instance.ally_types");
  inst.enemy_types = detail::types_from_json(field("enemy_types"), "instance.enemy_types");
  inst.ally_positions = detail::positions_from_json(field("ally_positions"), "instance.ally_positions");
  inst.enemy_positions = detail::positions_from_json(field("enemy_positions"), "instance.enemy_positions");
  return inst;
}

}  // namespace smacsim
