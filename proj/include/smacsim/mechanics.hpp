#pragma once

// Shared rules used by the engine, the built-in opponent and the scripted
// policies: movement, action legality, and greedy steering.

#include <limits>
#include <vector>

#include "smacsim/action.hpp"
#include "smacsim/epo.hpp"
#include "smacsim/world.hpp"

namespace smacsim {

inline Vec2 move_direction(ActionKind k) {
  switch (k) {
    case ActionKind::move_north: return {0.0, 1.0};
    case ActionKind::move_south: return {0.0, -1.0};
    case ActionKind::move_east: return {1.0, 0.0};
    case ActionKind::move_west: return {-1.0, 0.0};
    default: return {0.0, 0.0};
  }
}

// Position after a move, clipped to the map.
inline Vec2 moved_position(const WorldState& w, const UnitState& u, ActionKind k) {
  return clamp_to_map(u.position + move_direction(k) * w.spec_of(u).move_speed, w.map_width, w.map_height);
}

// Legality of `a` for member `index` of `team`. Range checks are inclusive.
// With an EPO table, ally attacks additionally need an EPO-visible target.
inline bool is_available(const WorldState& w, Team team, int index, const Action& a, const EpoTable* epo = nullptr) {
  const UnitState& u = w.member(team, index);
  if (!u.alive) return a.kind == ActionKind::no_op;
  const UnitTypeSpec& s = w.spec_of(u);
  switch (a.kind) {
    case ActionKind::no_op: return false;
    case ActionKind::stop:
    case ActionKind::move_north:
    case ActionKind::move_south:
    case ActionKind::move_east:
    case ActionKind::move_west: return true;
    case ActionKind::attack: {
      const Team other = opponent_of(team);
      if (s.is_healer || a.target < 0 || a.target >= w.team_size(other)) return false;
      const UnitState& t = w.member(other, a.target);
      if (!t.alive || distance(u.position, t.position) > s.attack_range) return false;
      if (epo && team == Team::ally && !epo->visible(index, a.target)) return false;
      return true;
    }
    case ActionKind::heal: {
      if (!s.is_healer || a.target < 0 || a.target >= w.team_size(team) || a.target == index) return false;
      const UnitState& t = w.member(team, a.target);
      return t.alive && distance(u.position, t.position) <= s.attack_range;
    }
  }
  return false;
}

// Mask over the team's ActionSpace. Moves stay available at the map edge.
inline std::vector<bool> available_actions(const WorldState& w, Team team, int index, const EpoTable* epo = nullptr) {
  const ActionSpace space = w.action_space(team);
  std::vector<bool> mask(static_cast<std::size_t>(space.size()), false);
  for (int id = 0; id < space.size(); ++id) mask[static_cast<std::size_t>(id)] = is_available(w, team, index, space.decode(id), epo);
  return mask;
}

inline std::vector<bool> available_actions(const WorldState& w, int agent, const EpoTable* epo = nullptr) {
  return available_actions(w, Team::ally, agent, epo);
}

// The move that brings `u` closest to `target` (ties: lowest action id), or
// stop if no move gets closer.
inline Action move_toward(const WorldState& w, const UnitState& u, Vec2 target) {
  Action best = Action::stop();
  double best_d = distance(u.position, target);
  for (ActionKind k : kMoves) {
    const double d = distance(moved_position(w, u, k), target);
    if (d < best_d) {
      best_d = d;
      best = {k, -1};
    }
  }
  return best;
}

// The move that takes `u` furthest from `threat` (ties: lowest action id).
inline Action move_away(const WorldState& w, const UnitState& u, Vec2 threat) {
  Action best = Action::stop();
  double best_d = distance(u.position, threat);
  for (ActionKind k : kMoves) {
    const double d = distance(moved_position(w, u, k), threat);
    if (d > best_d) {
      best_d = d;
      best = {k, -1};
    }
  }
  return best;
}

// Index of the nearest living member of `team` to `from` (ties: lowest
// index), or -1.
inline int nearest_alive(const WorldState& w, Team team, Vec2 from, int exclude = -1) {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < w.team_size(team); ++i) {
    const UnitState& u = w.member(team, i);
    if (!u.alive || i == exclude) continue;
    const double d = distance(from, u.position);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace smacsim
