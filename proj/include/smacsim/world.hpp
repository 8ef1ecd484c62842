#pragma once

#include <bit>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "smacsim/action.hpp"
#include "smacsim/errors.hpp"
#include "smacsim/geometry.hpp"
#include "smacsim/rng.hpp"
#include "smacsim/scenario.hpp"
#include "smacsim/units.hpp"

namespace smacsim {

enum class Team : std::uint8_t { ally, enemy };

struct UnitState {
  UnitType type = UnitType::stalker;
  Team team = Team::ally;
  Vec2 position;
  double health = 0.0;
  double shield = 0.0;
  Vec2 facing{1.0, 0.0};  // field-of-view direction, unit length while alive
  int cooldown_remaining = 0;
  bool alive = false;
  int last_action = 0;  // encoded in the unit's own ActionSpace
  int steps_since_damage = 0;
  // Reward already credited for damage to this unit (enemies only); capped at
  // max_health + max_shield so healing cannot be farmed.
  double damage_credited = 0.0;
};

struct WorldState {
  std::vector<UnitState> units;  // allies, then enemies; indices are stable
  int n_allies = 0;
  int n_enemies = 0;
  int step = 0;
  double map_width = 0.0;
  double map_height = 0.0;
  int episode_limit = 0;
  bool terminated = false;
  bool won = false;
  Rng rng;
  std::shared_ptr<const ScenarioInstance> scenario;
  std::shared_ptr<const StatTable> stats;

  UnitState& ally(int i) { return units[static_cast<std::size_t>(i)]; }
  const UnitState& ally(int i) const { return units[static_cast<std::size_t>(i)]; }
  UnitState& enemy(int j) { return units[static_cast<std::size_t>(n_allies + j)]; }
  const UnitState& enemy(int j) const { return units[static_cast<std::size_t>(n_allies + j)]; }

  std::span<const UnitState> allies() const { return {units.data(), static_cast<std::size_t>(n_allies)}; }
  std::span<const UnitState> enemies() const {
    return {units.data() + n_allies, static_cast<std::size_t>(n_enemies)};
  }

  // Member of `team` at index i within that team.
  const UnitState& member(Team team, int i) const { return team == Team::ally ? ally(i) : enemy(i); }
  int team_size(Team team) const { return team == Team::ally ? n_allies : n_enemies; }

  const UnitTypeSpec& spec_of(const UnitState& u) const { return (*stats)[u.type]; }

  ActionSpace action_space(Team team) const {
    return team == Team::ally ? ActionSpace{n_enemies, n_allies} : ActionSpace{n_allies, n_enemies};
  }

  int alive_count(Team team) const {
    int n = 0;
    for (const auto& u : team == Team::ally ? allies() : enemies()) n += u.alive ? 1 : 0;
    return n;
  }
};

inline Team opponent_of(Team t) { return t == Team::ally ? Team::enemy : Team::ally; }

// Places every unit at its scenario position with full health and shield.
// Identical (scenario, seed) gives a bit-identical world.
inline WorldState init_world(std::shared_ptr<const ScenarioInstance> scenario, std::shared_ptr<const StatTable> stats,
                             std::uint64_t seed) {
  if (!scenario || !stats) throw ScenarioError("init_world: missing scenario or stat table");
  const ScenarioSpec& spec = scenario->spec;
  const auto na = static_cast<int>(scenario->ally_types.size());
  const auto ne = static_cast<int>(scenario->enemy_types.size());
  if (na <= 0 || ne <= 0) throw ScenarioError("init_world: both teams need at least one unit");
  if (static_cast<int>(scenario->ally_positions.size()) != na || static_cast<int>(scenario->enemy_positions.size()) != ne)
    throw ScenarioError("init_world: position and type counts differ");

  WorldState w;
  w.n_allies = na;
  w.n_enemies = ne;
  w.map_width = spec.map_width;
  w.map_height = spec.map_height;
  w.episode_limit = spec.episode_limit;
  w.rng = Rng(derive_seed(seed, Stream::engine));
  w.units.reserve(static_cast<std::size_t>(na + ne));

  auto add = [&](UnitType type, Team team, Vec2 pos) {
    if (!inside_map(pos, w.map_width, w.map_height))
      throw ScenarioError("init_world: unit at (" + std::to_string(pos.x) + ", " + std::to_string(pos.y) +
                          ") is outside the map");
    for (const auto& other : w.units)
      if (distance(other.position, pos) < spec.geometry.min_separation)
        throw ScenarioError("init_world: units closer than the minimum separation");
    const UnitTypeSpec& s = (*stats)[type];
    UnitState u;
    u.type = type;
    u.team = team;
    u.position = pos;
    u.health = s.max_health;
    u.shield = s.max_shield;
    u.facing = team == Team::ally ? Vec2{1.0, 0.0} : Vec2{-1.0, 0.0};
    u.alive = true;
    u.last_action = static_cast<int>(ActionKind::no_op);
    w.units.push_back(u);
  };
  for (int i = 0; i < na; ++i) add(scenario->ally_types[i], Team::ally, scenario->ally_positions[i]);
  for (int j = 0; j < ne; ++j) add(scenario->enemy_types[j], Team::enemy, scenario->enemy_positions[j]);

  w.scenario = std::move(scenario);
  w.stats = std::move(stats);
  return w;
}

// Canonical byte form: every field in a fixed order, doubles as raw IEEE bits,
// integers little-endian. Equal worlds give equal bytes.
inline std::string canonical_bytes(const WorldState& w) {
  std::string out;
  auto put_u64 = [&](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  };
  auto put_i = [&](std::int64_t v) { put_u64(static_cast<std::uint64_t>(v)); };
  auto put_d = [&](double v) { put_u64(std::bit_cast<std::uint64_t>(v)); };
  put_i(w.n_allies);
  put_i(w.n_enemies);
  put_i(w.step);
  put_d(w.map_width);
  put_d(w.map_height);
  put_i(w.episode_limit);
  put_i(w.terminated);
  put_i(w.won);
  for (const auto& u : w.units) {
    put_i(static_cast<int>(u.type));
    put_i(static_cast<int>(u.team));
    put_d(u.position.x);
    put_d(u.position.y);
    put_d(u.health);
    put_d(u.shield);
    put_d(u.facing.x);
    put_d(u.facing.y);
    put_i(u.cooldown_remaining);
    put_i(u.alive);
    put_i(u.last_action);
    put_i(u.steps_since_damage);
    put_d(u.damage_credited);
  }
  out += w.rng.state();
  return out;
}

// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xCBF29CE484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline std::uint64_t world_hash(const WorldState& w) { return fnv1a(canonical_bytes(w)); }

}  // namespace smacsim
