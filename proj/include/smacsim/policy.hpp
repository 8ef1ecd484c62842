#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "smacsim/env.hpp"

namespace smacsim {

// What an agent is handed when choosing an action. Closed-loop policies may
// look at `env`; open-loop ones read only `agent` and `timestep` (plus the
// available-actions mask, which the environment supplies to everyone).
struct AgentContext {
  const Env& env;
  int agent;
  int timestep;
  const std::vector<bool>& avail;
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  // Returns an action id in the ally ActionSpace.
  virtual int act(const AgentContext& ctx, Rng& rng) = 0;
  virtual std::unique_ptr<Policy> clone() const = 0;
};

namespace detail {

inline int first_available(const std::vector<bool>& avail, std::initializer_list<ActionKind> prefs) {
  for (ActionKind k : prefs)
    if (avail[static_cast<std::size_t>(k)]) return static_cast<int>(k);
  return static_cast<int>(ActionKind::no_op);
}

inline int stop_or_noop(const std::vector<bool>& avail) { return first_available(avail, {ActionKind::stop}); }

}  // namespace detail

class RandomPolicy final : public Policy {
 public:
  std::string name() const override { return "random"; }
  int act(const AgentContext& ctx, Rng& rng) override {
    std::vector<int> ids;
    for (std::size_t i = 0; i < ctx.avail.size(); ++i)
      if (ctx.avail[i]) ids.push_back(static_cast<int>(i));
    if (ids.empty()) return 0;
    return ids[static_cast<std::size_t>(rng.below(ids.size()))];
  }
  std::unique_ptr<Policy> clone() const override { return std::make_unique<RandomPolicy>(*this); }
};

class StopPolicy final : public Policy {
 public:
  std::string name() const override { return "stop"; }
  int act(const AgentContext& ctx, Rng&) override { return detail::stop_or_noop(ctx.avail); }
  std::unique_ptr<Policy> clone() const override { return std::make_unique<StopPolicy>(*this); }
};

// ---------------------------------------------------------------------------
// Scripted experts

namespace detail {

// Enemy seen by at least one living ally (sight range, and EPO verdict if any).
inline bool team_visible(const WorldState& w, int enemy, const EpoTable* epo) {
  const UnitState& e = w.enemy(enemy);
  if (!e.alive) return false;
  for (int i = 0; i < w.n_allies; ++i) {
    const UnitState& a = w.ally(i);
    if (a.alive && distance(a.position, e.position) <= w.spec_of(a).sight_range && (!epo || epo->visible(i, enemy)))
      return true;
  }
  return false;
}

inline double hit_points(const UnitState& u) { return u.health + u.shield; }

// Heal the most damaged ally in range, else stay near the closest ally.
inline Action healer_action(const WorldState& w, int agent) {
  const UnitState& self = w.ally(agent);
  const UnitTypeSpec& s = w.spec_of(self);
  int best = -1;
  double best_frac = 1.0;
  for (int i = 0; i < w.n_allies; ++i) {
    const UnitState& t = w.ally(i);
    if (i == agent || !t.alive) continue;
    const double frac = t.health / w.spec_of(t).max_health;
    if (frac < best_frac && distance(self.position, t.position) <= s.attack_range) {
      best_frac = frac;
      best = i;
    }
  }
  if (best >= 0) return Action::heal(best);
  const int buddy = nearest_alive(w, Team::ally, self.position, agent);
  if (buddy < 0 || distance(self.position, w.ally(buddy).position) <= s.attack_range / 2.0) return Action::stop();
  return move_toward(w, self, w.ally(buddy).position);
}

}  // namespace detail

// Every agent goes for the same enemy: the visible one with the lowest
// (health + shield, index). Attack it when in range, otherwise approach. If
// no enemy is visible the team closes on the nearest enemy.
inline Action scripted_focus_fire(const WorldState& w, int agent, const EpoTable* epo = nullptr) {
  const UnitState& self = w.ally(agent);
  if (!self.alive) return Action::no_op();
  if (w.spec_of(self).is_healer) return detail::healer_action(w, agent);

  int target = -1;
  for (int e = 0; e < w.n_enemies; ++e) {
    if (!detail::team_visible(w, e, epo)) continue;
    if (target < 0 || detail::hit_points(w.enemy(e)) < detail::hit_points(w.enemy(target))) target = e;
  }
  if (target < 0) target = nearest_alive(w, Team::enemy, self.position);
  if (target < 0) return Action::stop();

  if (is_available(w, Team::ally, agent, Action::attack(target), epo)) return Action::attack(target);
  if (distance(self.position, w.enemy(target).position) <= w.spec_of(self).attack_range) {
    // In range but not targetable (EPO): settle for the weakest enemy we can hit.
    int alt = -1;
    for (int e = 0; e < w.n_enemies; ++e)
      if (is_available(w, Team::ally, agent, Action::attack(e), epo) &&
          (alt < 0 || detail::hit_points(w.enemy(e)) < detail::hit_points(w.enemy(alt))))
        alt = e;
    if (alt >= 0) return Action::attack(alt);
  }
  return move_toward(w, self, w.enemy(target).position);
}

// Attack the nearest attackable enemy when the weapon is ready; otherwise
// back away from the nearest enemy while it is inside our attack range, and
// close in when it is beyond it.
inline Action scripted_kite(const WorldState& w, int agent, const EpoTable* epo = nullptr) {
  const UnitState& self = w.ally(agent);
  if (!self.alive) return Action::no_op();
  const UnitTypeSpec& s = w.spec_of(self);
  if (s.is_healer) return detail::healer_action(w, agent);

  const int nearest = nearest_alive(w, Team::enemy, self.position);
  if (nearest < 0) return Action::stop();

  if (self.cooldown_remaining == 0) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int e = 0; e < w.n_enemies; ++e) {
      if (!is_available(w, Team::ally, agent, Action::attack(e), epo)) continue;
      const double d = distance(self.position, w.enemy(e).position);
      if (d < best_d) {
        best_d = d;
        best = e;
      }
    }
    if (best >= 0) return Action::attack(best);
  }
  const Vec2 threat = w.enemy(nearest).position;
  if (s.is_suicide_splash || distance(self.position, threat) > s.attack_range) return move_toward(w, self, threat);
  return move_away(w, self, threat);
}

// Adapts a scripted rule; when the environment hides the mask the rule still
// picks legal actions itself.
class ScriptedPolicy final : public Policy {
 public:
  using Rule = Action (*)(const WorldState&, int, const EpoTable*);
  ScriptedPolicy(std::string name, Rule rule) : name_(std::move(name)), rule_(rule) {}
  std::string name() const override { return name_; }
  int act(const AgentContext& ctx, Rng&) override {
    const Action a = rule_(ctx.env.world(), ctx.agent, ctx.env.epo());
    return ctx.env.world().action_space(Team::ally).encode(a);
  }
  std::unique_ptr<Policy> clone() const override { return std::make_unique<ScriptedPolicy>(*this); }

 private:
  std::string name_;
  Rule rule_;
};

// ---------------------------------------------------------------------------
// Open-loop

// Action distribution per (timestep, agent id), nothing else. Unseen keys
// and keys whose actions are all unavailable fall back to stop (no_op for a
// dead agent).
class OpenLoopPolicy final : public Policy {
 public:
  using Key = std::pair<int, int>;  // (timestep, agent)
  using Distribution = std::vector<std::pair<int, double>>;  // (action id, probability), ascending ids

  std::string name() const override { return "openloop"; }

  void set(int timestep, int agent, Distribution dist) { table_[{timestep, agent}] = std::move(dist); }

  const Distribution* find(int timestep, int agent) const {
    auto it = table_.find({timestep, agent});
    return it == table_.end() ? nullptr : &it->second;
  }

  const std::map<Key, Distribution>& table() const { return table_; }

  int act(const AgentContext& ctx, Rng& rng) override { return choose(ctx.timestep, ctx.agent, ctx.avail, rng); }

  int choose(int timestep, int agent, const std::vector<bool>& avail, Rng& rng) const {
    const Distribution* dist = find(timestep, agent);
    if (!dist) return detail::stop_or_noop(avail);
    double total = 0.0;
    for (const auto& [id, p] : *dist)
      if (id >= 0 && id < static_cast<int>(avail.size()) && avail[static_cast<std::size_t>(id)]) total += p;
    if (total <= 0.0) return detail::stop_or_noop(avail);
    const double u = rng.uniform() * total;
    double acc = 0.0;
    int last = -1;
    for (const auto& [id, p] : *dist) {
      if (id < 0 || id >= static_cast<int>(avail.size()) || !avail[static_cast<std::size_t>(id)]) continue;
      acc += p;
      last = id;
      if (u < acc) return id;
    }
    return last;
  }

  std::unique_ptr<Policy> clone() const override { return std::make_unique<OpenLoopPolicy>(*this); }

  nlohmann::json to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& [key, dist] : table_) {
      nlohmann::json d = nlohmann::json::array();
      for (const auto& [id, p] : dist) d.push_back({id, p});
      rows.push_back({{"t", key.first}, {"agent", key.second}, {"dist", d}});
    }
    return {{"kind", "openloop"}, {"table", rows}};
  }

  static OpenLoopPolicy from_json(const nlohmann::json& j) {
    OpenLoopPolicy p;
    if (!j.is_object() || !j.contains("table") || !j["table"].is_array())
      throw ConfigError("open-loop table: expected {\"table\": [...]}");
    for (const auto& row : j["table"]) {
      Distribution d;
      for (const auto& e : row.at("dist")) d.emplace_back(e.at(0).get<int>(), e.at(1).get<double>());
      p.set(row.at("t").get<int>(), row.at("agent").get<int>(), std::move(d));
    }
    return p;
  }

 private:
  std::map<Key, Distribution> table_;
};

inline std::unique_ptr<Policy> make_policy(const std::string& name) {
  if (name == "random") return std::make_unique<RandomPolicy>();
  if (name == "stop") return std::make_unique<StopPolicy>();
  if (name == "focus_fire") return std::make_unique<ScriptedPolicy>("focus_fire", &scripted_focus_fire);
  if (name == "kite") return std::make_unique<ScriptedPolicy>("kite", &scripted_kite);
  throw ConfigError("unknown policy '" + name + "'");
}

}  // namespace smacsim
