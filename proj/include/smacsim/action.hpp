#pragma once

#include <cstdint>
#include <string>

#include "smacsim/errors.hpp"

namespace smacsim {

enum class ActionKind : std::uint8_t { no_op, stop, move_north, move_south, move_east, move_west, attack, heal };

// `target` indexes the opposing team for attack and the acting unit's own
// team for heal, so the same type serves allies and enemies.
struct Action {
  ActionKind kind = ActionKind::no_op;
  int target = -1;

  static constexpr Action no_op() { return {ActionKind::no_op, -1}; }
  static constexpr Action stop() { return {ActionKind::stop, -1}; }
  static constexpr Action attack(int enemy) { return {ActionKind::attack, enemy}; }
  static constexpr Action heal(int ally) { return {ActionKind::heal, ally}; }

  constexpr bool is_move() const {
    return kind == ActionKind::move_north || kind == ActionKind::move_south || kind == ActionKind::move_east ||
           kind == ActionKind::move_west;
  }

  friend constexpr bool operator==(const Action&, const Action&) = default;
};

inline constexpr int kMoveActionCount = 4;
inline constexpr ActionKind kMoves[kMoveActionCount] = {ActionKind::move_north, ActionKind::move_south,
                                                        ActionKind::move_east, ActionKind::move_west};

// Flat integer encoding, SMAC-style:
//   0 no_op, 1 stop, 2 north, 3 south, 4 east, 5 west,
//   6 .. 6+n_opponents-1          attack(opponent),
//   6+n_opponents .. size()-1     heal(teammate).
struct ActionSpace {
  int n_opponents = 0;
  int n_teammates = 0;

  static constexpr int kFirstTarget = 6;

  constexpr int size() const { return kFirstTarget + n_opponents + n_teammates; }

  int encode(const Action& a) const {
    switch (a.kind) {
      case ActionKind::attack:
        if (a.target < 0 || a.target >= n_opponents) throw ActionError("attack target out of range");
        return kFirstTarget + a.target;
      case ActionKind::heal:
        if (a.target < 0 || a.target >= n_teammates) throw ActionError("heal target out of range");
        return kFirstTarget + n_opponents + a.target;
      default:
        return static_cast<int>(a.kind);
    }
  }

  Action decode(int id) const {
    if (id < 0 || id >= size()) throw ActionError("action id " + std::to_string(id) + " out of range");
    if (id < kFirstTarget) return {static_cast<ActionKind>(id), -1};
    if (id < kFirstTarget + n_opponents) return Action::attack(id - kFirstTarget);
    return Action::heal(id - kFirstTarget - n_opponents);
  }
};

inline std::string to_string(const Action& a) {
  switch (a.kind) {
    case ActionKind::no_op: return "no_op";
    case ActionKind::stop: return "stop";
    case ActionKind::move_north: return "move_north";
    case ActionKind::move_south: return "move_south";
    case ActionKind::move_east: return "move_east";
    case ActionKind::move_west: return "move_west";
    case ActionKind::attack: return "attack(" + std::to_string(a.target) + ")";
    case ActionKind::heal: return "heal(" + std::to_string(a.target) + ")";
  }
  return "?";
}

}  // namespace smacsim
