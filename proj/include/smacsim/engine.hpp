#pragma once

// One decision step of the combat simulation. Resolution order:
//
//   1. ally actions checked against the available-actions rules; an illegal
//      action is an error when the mask is enforced and becomes a no-op
//      (counted in events.invalid_actions) when it is not
//   2. ally moves
//   3. enemy actions computed from the same pre-step world, then enemy moves
//   4. attacks resolved simultaneously against pre-step positions; a unit off
//      cooldown deals damage and restarts its cooldown; shields absorb first
//   5. suicide units with a target in contact range detonate, damaging every
//      opposing unit within the splash radius, and die
//   6. heals (never revive a unit brought to 0 health in this step)
//   7. shield regeneration after the no-damage delay; cooldowns tick
//   8. deaths
//   9. reward
//  10. termination: a team eliminated, or step == episode_limit (ally loss)
//
// Facing follows the last nonzero displacement or attack/heal direction.

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "smacsim/mechanics.hpp"
#include "smacsim/opponent.hpp"

namespace smacsim {

struct RewardConfig {
  double kill_bonus = 10.0;
  double win_bonus = 200.0;
  // Maximum achievable episode reward after normalization.
  double cap = 20.0;
  // Weight on damage taken by allies; 0 keeps the reward non-negative.
  double damage_taken_weight = 0.0;
};

struct StepEvents {
  double damage_dealt = 0.0;     // enemy health + shield removed by allies
  double damage_credited = 0.0;  // part of damage_dealt that earns reward
  double damage_taken = 0.0;     // ally health + shield removed by enemies
  int kills = 0;                 // enemies killed by ally damage this step
  int ally_deaths = 0;
  double heals = 0.0;        // health restored to allies
  double enemy_heals = 0.0;  // health restored to enemies; never rewarded
  double enemy_shield_regen = 0.0;
  int invalid_actions = 0;
  bool won = false;
};

struct StepResult {
  double reward = 0.0;
  bool terminated = false;
  bool won = false;
  StepEvents events;
};

struct StepOptions {
  bool avail_mask_enabled = true;
  const Opponent* opponent = nullptr;  // nullptr: pursuit
  const EpoTable* epo = nullptr;
  RewardConfig reward;
};

// Unnormalized reward of a perfect episode: every enemy's health and shield,
// every kill bonus, and the win bonus.
inline double max_raw_episode_reward(const WorldState& w, const RewardConfig& cfg) {
  double total = cfg.win_bonus + cfg.kill_bonus * w.n_enemies;
  for (const auto& e : w.enemies()) total += w.spec_of(e).max_health + w.spec_of(e).max_shield;
  return total;
}

// Healing and shield regeneration on the enemy side contribute nothing.
inline double compute_reward(const StepEvents& ev, const WorldState& w, const RewardConfig& cfg) {
  const double raw = ev.damage_credited + cfg.kill_bonus * ev.kills + (ev.won ? cfg.win_bonus : 0.0) -
                     cfg.damage_taken_weight * ev.damage_taken;
  return raw * cfg.cap / max_raw_episode_reward(w, cfg);
}

inline StepResult step(WorldState& w, std::span<const Action> joint, const StepOptions& opt = {}) {
  if (w.terminated) throw ActionError("step called on a terminated episode");
  if (static_cast<int>(joint.size()) != w.n_allies)
    throw ActionError("expected " + std::to_string(w.n_allies) + " actions, got " + std::to_string(joint.size()));

  static const PursuitOpponent kDefaultOpponent;
  const Opponent& opponent = opt.opponent ? *opt.opponent : kDefaultOpponent;
  const std::size_t n_units = w.units.size();
  StepResult result;
  StepEvents& ev = result.events;

  // 1. legality
  std::vector<Action> acts(n_units, Action::no_op());
  for (int i = 0; i < w.n_allies; ++i) {
    Action a = joint[static_cast<std::size_t>(i)];
    if (!is_available(w, Team::ally, i, a, opt.epo)) {
      if (opt.avail_mask_enabled)
        throw ActionError("agent " + std::to_string(i) + ": action " + to_string(a) + " is not available");
      a = Action::no_op();
      ++ev.invalid_actions;
    }
    acts[static_cast<std::size_t>(i)] = a;
  }

  // 3a. enemy decisions see the pre-step world
  const std::vector<Action> enemy_acts = opponent.act(w, w.rng);
  if (static_cast<int>(enemy_acts.size()) != w.n_enemies)
    throw ActionError("opponent '" + opponent.name() + "' returned the wrong number of actions");
  for (int e = 0; e < w.n_enemies; ++e) {
    const Action& a = enemy_acts[static_cast<std::size_t>(e)];
    acts[static_cast<std::size_t>(w.n_allies + e)] = is_available(w, Team::enemy, e, a) ? a : Action::no_op();
  }

  const std::vector<UnitState> before = w.units;
  auto global_index = [&](Team team, int i) { return static_cast<std::size_t>(team == Team::ally ? i : w.n_allies + i); };
  auto face = [](UnitState& u, Vec2 dir) { u.facing = normalized_or(dir, u.facing); };

  // 2, 3b. moves
  for (std::size_t k = 0; k < n_units; ++k) {
    if (!acts[k].is_move()) continue;
    UnitState& u = w.units[k];
    const Vec2 next = moved_position(w, before[k], acts[k].kind);
    face(u, next - before[k].position);
    u.position = next;
  }

  // 4, 5. attacks and detonations accumulate into `incoming`
  std::vector<double> incoming(n_units, 0.0);
  std::vector<bool> detonated(n_units, false);
  for (std::size_t k = 0; k < n_units; ++k) {
    if (acts[k].kind != ActionKind::attack) continue;
    const UnitState& src = before[k];
    const UnitTypeSpec& s = w.spec_of(src);
    const Team other = opponent_of(src.team);
    const std::size_t t = global_index(other, acts[k].target);
    face(w.units[k], before[t].position - src.position);
    if (s.is_suicide_splash) {
      for (std::size_t v = 0; v < n_units; ++v)
        if (before[v].alive && before[v].team == other && distance(before[v].position, src.position) <= s.splash_radius)
          incoming[v] += s.attack_damage;
      detonated[k] = true;
    } else if (src.cooldown_remaining == 0) {
      incoming[t] += s.attack_damage;
      w.units[k].cooldown_remaining = s.attack_cooldown;
    }
  }

  std::vector<double> absorbed(n_units, 0.0);
  for (std::size_t k = 0; k < n_units; ++k) {
    if (incoming[k] <= 0.0 || !before[k].alive) continue;
    UnitState& u = w.units[k];
    const double dealt = std::min(incoming[k], u.health + u.shield);
    const double to_shield = std::min(dealt, u.shield);
    u.shield -= to_shield;
    u.health = std::max(0.0, u.health - (dealt - to_shield));
    absorbed[k] = dealt;
    if (u.team == Team::enemy) ev.damage_dealt += dealt;
    else ev.damage_taken += dealt;
  }
  for (std::size_t k = 0; k < n_units; ++k) {
    if (!detonated[k]) continue;
    w.units[k].health = 0.0;
    w.units[k].shield = 0.0;
  }

  // 6. heals
  for (std::size_t k = 0; k < n_units; ++k) {
    if (acts[k].kind != ActionKind::heal) continue;
    const UnitState& src = before[k];
    const std::size_t t = global_index(src.team, acts[k].target);
    face(w.units[k], before[t].position - src.position);
    UnitState& target = w.units[t];
    if (target.health <= 0.0) continue;
    const double amount = std::min(w.spec_of(src).heal_per_step, w.spec_of(target).max_health - target.health);
    target.health += amount;
    if (src.team == Team::ally) ev.heals += amount;
    else ev.enemy_heals += amount;
  }

  // 7. shield regeneration and cooldown ticks
  const StatTable& stats = *w.stats;
  for (std::size_t k = 0; k < n_units; ++k) {
    UnitState& u = w.units[k];
    if (!before[k].alive || u.health <= 0.0) continue;
    if (incoming[k] > 0.0) u.steps_since_damage = 0;
    else ++u.steps_since_damage;
    const double max_shield = w.spec_of(u).max_shield;
    if (max_shield > 0.0 && u.steps_since_damage >= stats.shield_regen_delay) {
      const double regen = std::min(stats.shield_regen_per_step, max_shield - u.shield);
      u.shield += regen;
      if (u.team == Team::enemy) ev.enemy_shield_regen += regen;
    }
    if (u.cooldown_remaining > 0) --u.cooldown_remaining;
  }

  // 8. deaths, reward credit, last actions
  for (std::size_t k = 0; k < n_units; ++k) {
    UnitState& u = w.units[k];
    const ActionSpace space = w.action_space(u.team);
    u.last_action = space.encode(acts[k]);
    if (u.team == Team::enemy && absorbed[k] > 0.0) {
      const double budget = w.spec_of(u).max_health + w.spec_of(u).max_shield - u.damage_credited;
      const double credit = std::min(absorbed[k], std::max(0.0, budget));
      u.damage_credited += credit;
      ev.damage_credited += credit;
    }
    if (before[k].alive && u.health <= 0.0) {
      u.alive = false;
      u.health = 0.0;
      u.shield = 0.0;
      u.cooldown_remaining = 0;
      if (u.team == Team::enemy) {
        if (absorbed[k] > 0.0) ++ev.kills;
      } else {
        ++ev.ally_deaths;
      }
    }
  }

  // 9, 10.
  ++w.step;
  const int allies_alive = w.alive_count(Team::ally);
  const int enemies_alive = w.alive_count(Team::enemy);
  w.won = enemies_alive == 0 && allies_alive > 0;
  w.terminated = allies_alive == 0 || enemies_alive == 0 || w.step >= w.episode_limit;
  ev.won = w.won;
  result.won = w.won;
  result.terminated = w.terminated;
  result.reward = compute_reward(ev, w, opt.reward);
  return result;
}

}  // namespace smacsim
