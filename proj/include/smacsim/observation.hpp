#pragma once

// Per-agent observations, the centralised state, their published index
// layouts, and the feature masks used by the feature-relevance experiments.
//
// Observation layout (one agent):
//   own:    health, shield, type[3], x, y, facing_x, facing_y
//   ally[k] for each other ally (k skips the observer):
//           visible, health, shield, rel_x, rel_y, distance
//           [+ last_action[n_actions] when ObsConfig::last_action is set]
//   enemy[j]: visible, health, shield, rel_x, rel_y, distance
//   move:   north, south, east, west (1 when the move is not blocked by the map edge)
//
// State layout:
//   per unit (allies then enemies): health, shield, x, y, type[3]
//   per ally: last_action[n_actions]
//   per unit: facing_x, facing_y
//
// Health and shield are divided by their maxima (shield 0 when the type has
// none), own and state positions by the map width and height, relative
// offsets and distances by the observer's sight range. Entities that are
// dead, out of sight, or EPO-denied leave an all-zero block.

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "smacsim/epo.hpp"
#include "smacsim/mechanics.hpp"

namespace smacsim {

using FeatureVector = std::vector<float>;

enum class Owner : std::uint8_t { own, ally, enemy, global, meta };

enum class Attribute : std::uint8_t {
  visible,
  health,
  shield,
  unit_type,
  x,
  y,
  distance,
  facing_x,
  facing_y,
  last_action,
  move_available,
  timestep,
  agent_id,
};

inline constexpr std::array<std::string_view, 5> kOwnerNames = {"own", "ally", "enemy", "global", "meta"};
inline constexpr std::array<std::string_view, 13> kAttributeNames = {
    "visible", "health", "shield", "unit_type", "x", "y", "distance", "facing_x", "facing_y",
    "last_action", "move_available", "timestep", "agent_id"};

struct FeatureSlot {
  std::string name;
  Owner owner = Owner::global;
  int entity = -1;  // ally/enemy index inside its block, -1 for own/global
  Attribute attribute = Attribute::visible;
};

enum class LayoutKind : std::uint8_t { observation, state };

struct ObsConfig {
  bool last_action = false;  // include other allies' last actions in observations
};

class FeatureLayout {
 public:
  LayoutKind kind = LayoutKind::observation;
  std::vector<FeatureSlot> slots;

  std::size_t size() const { return slots.size(); }
  const FeatureSlot& operator[](std::size_t i) const { return slots[i]; }

  std::size_t index_of(std::string_view name) const {
    for (std::size_t i = 0; i < slots.size(); ++i)
      if (slots[i].name == name) return i;
    throw LayoutError("no feature named '" + std::string(name) + "'");
  }

  // Machine-readable index manifest: position in "features" is the index.
  nlohmann::json manifest() const {
    nlohmann::json feats = nlohmann::json::array();
    for (const auto& s : slots)
      feats.push_back({{"name", s.name},
                       {"owner", std::string(kOwnerNames[static_cast<std::size_t>(s.owner)])},
                       {"entity", s.entity},
                       {"attribute", std::string(kAttributeNames[static_cast<std::size_t>(s.attribute)])}});
    return {{"kind", kind == LayoutKind::observation ? "observation" : "state"},
            {"size", slots.size()},
            {"features", std::move(feats)}};
  }

  // One-hot timestep (length episode_limit) and agent-id (length n_agents)
  // channels. Masks never touch them.
  FeatureLayout with_meta(int episode_limit, int n_agents) const {
    FeatureLayout out = *this;
    for (int t = 0; t < episode_limit; ++t)
      out.slots.push_back({"meta.timestep[" + std::to_string(t) + "]", Owner::meta, -1, Attribute::timestep});
    for (int i = 0; i < n_agents; ++i)
      out.slots.push_back({"meta.agent_id[" + std::to_string(i) + "]", Owner::meta, -1, Attribute::agent_id});
    return out;
  }
};

struct LayoutDims {
  int n_allies = 0;
  int n_enemies = 0;
  bool obs_last_action = false;

  int n_actions() const { return ActionSpace{n_enemies, n_allies}.size(); }
  int own_size() const { return 2 + static_cast<int>(kTypesPerRace) + 4; }
  int ally_block() const { return 6 + (obs_last_action ? n_actions() : 0); }
  int enemy_block() const { return 6; }
  int obs_size() const { return own_size() + (n_allies - 1) * ally_block() + n_enemies * enemy_block() + kMoveActionCount; }
  int unit_block() const { return 4 + static_cast<int>(kTypesPerRace); }
  int state_size() const {
    const int units = n_allies + n_enemies;
    return units * unit_block() + n_allies * n_actions() + units * 2;
  }

  static LayoutDims of(const WorldState& w, const ObsConfig& cfg = {}) {
    return {w.n_allies, w.n_enemies, cfg.last_action};
  }
};

inline FeatureLayout observation_layout(const LayoutDims& d) {
  FeatureLayout L;
  L.kind = LayoutKind::observation;
  auto add = [&](std::string name, Owner o, int e, Attribute a) { L.slots.push_back({std::move(name), o, e, a}); };
  add("own.health", Owner::own, -1, Attribute::health);
  add("own.shield", Owner::own, -1, Attribute::shield);
  for (std::size_t k = 0; k < kTypesPerRace; ++k)
    add("own.type[" + std::to_string(k) + "]", Owner::own, -1, Attribute::unit_type);
  add("own.x", Owner::own, -1, Attribute::x);
  add("own.y", Owner::own, -1, Attribute::y);
  add("own.facing_x", Owner::own, -1, Attribute::facing_x);
  add("own.facing_y", Owner::own, -1, Attribute::facing_y);
  auto entity = [&](const std::string& prefix, Owner o, int e, bool actions) {
    add(prefix + ".visible", o, e, Attribute::visible);
    add(prefix + ".health", o, e, Attribute::health);
    add(prefix + ".shield", o, e, Attribute::shield);
    add(prefix + ".rel_x", o, e, Attribute::x);
    add(prefix + ".rel_y", o, e, Attribute::y);
    add(prefix + ".distance", o, e, Attribute::distance);
    if (actions)
      for (int a = 0; a < d.n_actions(); ++a)
        add(prefix + ".last_action[" + std::to_string(a) + "]", o, e, Attribute::last_action);
  };
  for (int k = 0; k < d.n_allies - 1; ++k) entity("ally[" + std::to_string(k) + "]", Owner::ally, k, d.obs_last_action);
  for (int j = 0; j < d.n_enemies; ++j) entity("enemy[" + std::to_string(j) + "]", Owner::enemy, j, false);
  for (const char* m : {"move.north", "move.south", "move.east", "move.west"})
    add(m, Owner::global, -1, Attribute::move_available);
  return L;
}

inline FeatureLayout state_layout(const LayoutDims& d) {
  FeatureLayout L;
  L.kind = LayoutKind::state;
  auto add = [&](std::string name, Owner o, int e, Attribute a) { L.slots.push_back({std::move(name), o, e, a}); };
  auto unit_name = [&](int u) {
    return u < d.n_allies ? "ally[" + std::to_string(u) + "]" : "enemy[" + std::to_string(u - d.n_allies) + "]";
  };
  auto owner = [&](int u) { return u < d.n_allies ? Owner::ally : Owner::enemy; };
  auto local = [&](int u) { return u < d.n_allies ? u : u - d.n_allies; };
  const int units = d.n_allies + d.n_enemies;
  for (int u = 0; u < units; ++u) {
    const std::string p = unit_name(u);
    add(p + ".health", owner(u), local(u), Attribute::health);
    add(p + ".shield", owner(u), local(u), Attribute::shield);
    add(p + ".x", owner(u), local(u), Attribute::x);
    add(p + ".y", owner(u), local(u), Attribute::y);
    for (std::size_t k = 0; k < kTypesPerRace; ++k)
      add(p + ".type[" + std::to_string(k) + "]", owner(u), local(u), Attribute::unit_type);
  }
  for (int i = 0; i < d.n_allies; ++i)
    for (int a = 0; a < d.n_actions(); ++a)
      add(unit_name(i) + ".last_action[" + std::to_string(a) + "]", Owner::ally, i, Attribute::last_action);
  for (int u = 0; u < units; ++u) {
    add(unit_name(u) + ".facing_x", owner(u), local(u), Attribute::facing_x);
    add(unit_name(u) + ".facing_y", owner(u), local(u), Attribute::facing_y);
  }
  return L;
}

// ---------------------------------------------------------------------------
// Builders

inline FeatureVector build_observation(const WorldState& w, int agent, const EpoTable* epo = nullptr,
                                       const ObsConfig& cfg = {}) {
  const LayoutDims d = LayoutDims::of(w, cfg);
  FeatureVector obs(static_cast<std::size_t>(d.obs_size()), 0.0f);
  const UnitState& self = w.ally(agent);
  if (!self.alive) return obs;
  const UnitTypeSpec& s = w.spec_of(self);
  const double sight = s.sight_range;

  std::size_t k = 0;
  auto put = [&](double v) { obs[k++] = static_cast<float>(v); };
  auto ratio = [](double v, double max) { return max > 0.0 ? v / max : 0.0; };

  put(ratio(self.health, s.max_health));
  put(ratio(self.shield, s.max_shield));
  for (std::size_t t = 0; t < kTypesPerRace; ++t) put(race_slot(self.type) == t ? 1.0 : 0.0);
  put(self.position.x / w.map_width);
  put(self.position.y / w.map_height);
  put(self.facing.x);
  put(self.facing.y);

  auto entity = [&](const UnitState& u, bool visible, int last_action_dims, int last_action) {
    const std::size_t start = k;
    const std::size_t block = 6 + static_cast<std::size_t>(last_action_dims);
    if (!visible) {
      k = start + block;
      return;
    }
    const UnitTypeSpec& us = w.spec_of(u);
    const Vec2 rel = u.position - self.position;
    put(1.0);
    put(ratio(u.health, us.max_health));
    put(ratio(u.shield, us.max_shield));
    put(rel.x / sight);
    put(rel.y / sight);
    put(rel.norm() / sight);
    if (last_action_dims > 0) obs[k + static_cast<std::size_t>(last_action)] = 1.0f;
    k = start + block;
  };
  const int la_dims = cfg.last_action ? d.n_actions() : 0;
  for (int i = 0; i < w.n_allies; ++i) {
    if (i == agent) continue;
    const UnitState& u = w.ally(i);
    entity(u, u.alive && distance(u.position, self.position) <= sight, la_dims, u.last_action);
  }
  for (int j = 0; j < w.n_enemies; ++j) {
    const UnitState& u = w.enemy(j);
    const bool seen = u.alive && distance(u.position, self.position) <= sight && (!epo || epo->visible(agent, j));
    entity(u, seen, 0, 0);
  }
  for (ActionKind m : kMoves) put(moved_position(w, self, m) == self.position ? 0.0 : 1.0);
  return obs;
}

inline FeatureVector build_state(const WorldState& w) {
  const LayoutDims d = LayoutDims::of(w);
  FeatureVector st(static_cast<std::size_t>(d.state_size()), 0.0f);
  std::size_t k = 0;
  auto put = [&](double v) { st[k++] = static_cast<float>(v); };
  for (const UnitState& u : w.units) {
    if (!u.alive) {
      k += static_cast<std::size_t>(d.unit_block());
      continue;
    }
    const UnitTypeSpec& s = w.spec_of(u);
    put(u.health / s.max_health);
    put(s.max_shield > 0.0 ? u.shield / s.max_shield : 0.0);
    put(u.position.x / w.map_width);
    put(u.position.y / w.map_height);
    for (std::size_t t = 0; t < kTypesPerRace; ++t) put(race_slot(u.type) == t ? 1.0 : 0.0);
  }
  for (const UnitState& u : w.allies()) {
    st[k + static_cast<std::size_t>(u.last_action)] = 1.0f;
    k += static_cast<std::size_t>(d.n_actions());
  }
  for (const UnitState& u : w.units) {
    put(u.alive ? u.facing.x : 0.0);
    put(u.alive ? u.facing.y : 0.0);
  }
  return st;
}

// Appends the one-hot timestep and agent-id channels described by
// FeatureLayout::with_meta.
inline void append_meta(FeatureVector& v, int timestep, int episode_limit, int agent, int n_agents) {
  const std::size_t base = v.size();
  v.resize(base + static_cast<std::size_t>(episode_limit + n_agents), 0.0f);
  if (timestep >= 0 && timestep < episode_limit) v[base + static_cast<std::size_t>(timestep)] = 1.0f;
  if (agent >= 0 && agent < n_agents) v[base + static_cast<std::size_t>(episode_limit + agent)] = 1.0f;
}

// ---------------------------------------------------------------------------
// Masks

enum class MaskId : std::uint8_t {
  everything,
  nothing,
  health_ally,
  shield_ally,
  distance_ally,
  health_and_shield_ally,
  actions_only,
  all_except_actions,
  ally_all,
  health_enemy,
  shield_enemy,
  distance_enemy,
  enemy_all,
};

inline constexpr std::size_t kMaskCount = 13;

struct FeatureFlags {
  bool health = false;
  bool shield = false;
  bool x = false;
  bool y = false;
  bool distance = false;
  bool actions = false;
};

struct FeatureMask {
  MaskId id = MaskId::nothing;
  std::string_view name;
  FeatureFlags ally;
  FeatureFlags enemy;
  // Zeroes every non-meta feature, including visibility flags, unit types,
  // facing and movement bits.
  bool whole = false;
};

inline const std::array<FeatureMask, kMaskCount>& all_masks() {
  constexpr FeatureFlags none{};
  constexpr FeatureFlags all{true, true, true, true, true, true};
  static const std::array<FeatureMask, kMaskCount> masks = {{
      {MaskId::everything, "everything", all, all, true},
      {MaskId::nothing, "nothing", none, none, false},
      {MaskId::health_ally, "health_ally", {true, false, false, false, false, false}, none, false},
      {MaskId::shield_ally, "shield_ally", {false, true, false, false, false, false}, none, false},
      {MaskId::distance_ally, "distance_ally", {false, false, true, true, true, false}, none, false},
      {MaskId::health_and_shield_ally, "health_and_shield_ally", {true, true, false, false, false, false}, none, false},
      {MaskId::actions_only, "actions_only", {false, false, false, false, false, true}, none, false},
      {MaskId::all_except_actions, "all_except_actions", {true, true, true, true, true, false}, none, false},
      {MaskId::ally_all, "ally_all", all, none, false},
      {MaskId::health_enemy, "health_enemy", none, {true, false, false, false, false, false}, false},
      {MaskId::shield_enemy, "shield_enemy", none, {false, true, false, false, false, false}, false},
      {MaskId::distance_enemy, "distance_enemy", none, {false, false, true, true, true, false}, false},
      {MaskId::enemy_all, "enemy_all", none, {true, true, true, true, true, false}, false},
  }};
  return masks;
}

inline const FeatureMask& mask_of(MaskId id) { return all_masks()[static_cast<std::size_t>(id)]; }

inline const FeatureMask& mask_by_name(std::string_view name) {
  for (const auto& m : all_masks())
    if (m.name == name) return m;
  throw ConfigError("unknown mask '" + std::string(name) + "'");
}

inline bool flag_covers(const FeatureFlags& f, Attribute a) {
  switch (a) {
    case Attribute::health: return f.health;
    case Attribute::shield: return f.shield;
    case Attribute::x: return f.x;
    case Attribute::y: return f.y;
    case Attribute::distance: return f.distance;
    case Attribute::last_action: return f.actions;
    default: return false;
  }
}

// Whether `mask` zeroes `slot`. With own_exempt, the observer's own block is
// untouched by ally masks; without it, the own block counts as an ally.
inline bool masks_slot(const FeatureSlot& slot, const FeatureMask& mask, bool own_exempt = true) {
  if (slot.owner == Owner::meta) return false;
  if (mask.whole) return true;
  switch (slot.owner) {
    case Owner::own: return !own_exempt && flag_covers(mask.ally, slot.attribute);
    case Owner::ally: return flag_covers(mask.ally, slot.attribute);
    case Owner::enemy: return flag_covers(mask.enemy, slot.attribute);
    default: return false;
  }
}

inline std::vector<std::size_t> masked_indices(const FeatureLayout& layout, const FeatureMask& mask,
                                               bool own_exempt = true) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < layout.size(); ++i)
    if (masks_slot(layout[i], mask, own_exempt)) out.push_back(i);
  return out;
}

inline void apply_mask_inplace(std::span<float> v, const FeatureLayout& layout, const FeatureMask& mask,
                               bool own_exempt = true) {
  if (v.size() != layout.size())
    throw LayoutError("vector of length " + std::to_string(v.size()) + " does not match layout of size " +
                      std::to_string(layout.size()));
  for (std::size_t i = 0; i < v.size(); ++i)
    if (masks_slot(layout[i], mask, own_exempt)) v[i] = 0.0f;
}

inline FeatureVector apply_mask(std::span<const float> v, const FeatureLayout& layout, const FeatureMask& mask,
                                bool own_exempt = true) {
  FeatureVector out(v.begin(), v.end());
  apply_mask_inplace(out, layout, mask, own_exempt);
  return out;
}

}  // namespace smacsim
