#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "smacsim/mechanics.hpp"

namespace smacsim {

// Controller for the enemy team. Must be a deterministic function of the
// world and the rng it is handed. Returns one action per enemy (no_op for
// dead enemies).
class Opponent {
 public:
  virtual ~Opponent() = default;
  virtual std::vector<Action> act(const WorldState& w, Rng& rng) const = 0;
  virtual std::string name() const = 0;
};

// Aggressive pursuit: attack the nearest ally in range, otherwise walk
// toward the nearest ally anywhere on the map. Healers mend the nearest
// damaged teammate in range or trail the team centroid. Never retreats, so it
// can be lured out of position.
class PursuitOpponent final : public Opponent {
 public:
  std::vector<Action> act(const WorldState& w, Rng&) const override {
    std::vector<Action> out(static_cast<std::size_t>(w.n_enemies), Action::no_op());
    const bool allies_left = w.alive_count(Team::ally) > 0;
    for (int e = 0; e < w.n_enemies; ++e) {
      const UnitState& u = w.enemy(e);
      if (!u.alive) continue;
      Action& a = out[static_cast<std::size_t>(e)];
      if (!allies_left) {
        a = Action::stop();
        continue;
      }
      const UnitTypeSpec& s = w.spec_of(u);
      a = s.is_healer ? heal_or_follow(w, e) : attack_or_pursue(w, u, s);
    }
    return out;
  }

  std::string name() const override { return "pursuit"; }

 private:
  static Action attack_or_pursue(const WorldState& w, const UnitState& u, const UnitTypeSpec& s) {
    const int target = nearest_alive(w, Team::ally, u.position);
    if (distance(u.position, w.ally(target).position) <= s.attack_range) return Action::attack(target);
    return move_toward(w, u, w.ally(target).position);
  }

  static Action heal_or_follow(const WorldState& w, int self) {
    const UnitState& u = w.enemy(self);
    const UnitTypeSpec& s = w.spec_of(u);
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    Vec2 centroid;
    int others = 0;
    for (int j = 0; j < w.n_enemies; ++j) {
      const UnitState& t = w.enemy(j);
      if (j == self || !t.alive) continue;
      centroid = centroid + t.position;
      ++others;
      const double d = distance(u.position, t.position);
      if (t.health < w.spec_of(t).max_health && d <= s.attack_range && d < best_d) {
        best_d = d;
        best = j;
      }
    }
    if (best >= 0) return Action::heal(best);
    if (others == 0) return Action::stop();
    centroid = centroid * (1.0 / others);
    if (distance(u.position, centroid) <= s.move_speed) return Action::stop();
    return move_toward(w, u, centroid);
  }
};

// Every living enemy stops. Used to isolate ally-side mechanics.
class IdleOpponent final : public Opponent {
 public:
  std::vector<Action> act(const WorldState& w, Rng&) const override {
    std::vector<Action> out(static_cast<std::size_t>(w.n_enemies), Action::no_op());
    for (int e = 0; e < w.n_enemies; ++e)
      if (w.enemy(e).alive) out[static_cast<std::size_t>(e)] = Action::stop();
    return out;
  }
  std::string name() const override { return "idle"; }
};

// Wraps a callable; for tests and user scripts.
class ScriptedOpponent final : public Opponent {
 public:
  using Fn = std::function<std::vector<Action>(const WorldState&, Rng&)>;
  ScriptedOpponent(std::string name, Fn fn) : name_(std::move(name)), fn_(std::move(fn)) {}
  std::vector<Action> act(const WorldState& w, Rng& rng) const override { return fn_(w, rng); }
  std::string name() const override { return name_; }

 private:
  std::string name_;
  Fn fn_;
};

inline std::shared_ptr<const Opponent> make_opponent(const std::string& name) {
  if (name == "pursuit") return std::make_shared<PursuitOpponent>();
  if (name == "idle") return std::make_shared<IdleOpponent>();
  throw ConfigError("unknown opponent '" + name + "'");
}

}  // namespace smacsim
