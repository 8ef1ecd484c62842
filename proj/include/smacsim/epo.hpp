#pragma once

// Extended partial observability. Each enemy gets a guaranteed first observer
// the first time any ally sights it; every other ally gets a single
// Bernoulli(p) draw deciding whether it may ever observe that enemy. If the
// first observer dies, the next ally to sight the enemy becomes the new
// guaranteed observer and everyone else is drawn again.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "smacsim/rng.hpp"
#include "smacsim/world.hpp"

namespace smacsim {

enum class Verdict : std::uint8_t { undetermined, granted, denied };

class EpoTable {
 public:
  EpoTable(double p, int n_agents, int n_enemies, std::uint64_t episode_seed)
      : p_(p),
        n_agents_(n_agents),
        n_enemies_(n_enemies),
        verdict_(static_cast<std::size_t>(n_agents * n_enemies), Verdict::undetermined),
        first_observer_(static_cast<std::size_t>(n_enemies), -1),
        rng_(derive_seed(episode_seed, Stream::epo)) {}

  double p() const { return p_; }
  int n_agents() const { return n_agents_; }
  int n_enemies() const { return n_enemies_; }

  Verdict verdict(int agent, int enemy) const { return verdict_[index(agent, enemy)]; }

  std::optional<int> first_observer(int enemy) const {
    const int fo = first_observer_[static_cast<std::size_t>(enemy)];
    return fo < 0 ? std::nullopt : std::optional<int>(fo);
  }

  // Undetermined counts as visible: nobody has sighted the enemy yet, so
  // sight gating hides it anyway.
  bool visible(int agent, int enemy) const { return verdict(agent, enemy) != Verdict::denied; }

  // Per living agent, the living enemies within its sight range.
  static std::vector<std::vector<int>> sight_sets(const WorldState& w) {
    std::vector<std::vector<int>> sets(static_cast<std::size_t>(w.n_allies));
    for (int i = 0; i < w.n_allies; ++i) {
      const UnitState& a = w.ally(i);
      if (!a.alive) continue;
      const double sight = w.spec_of(a).sight_range;
      for (int e = 0; e < w.n_enemies; ++e) {
        const UnitState& en = w.enemy(e);
        if (en.alive && distance(a.position, en.position) <= sight) sets[static_cast<std::size_t>(i)].push_back(e);
      }
    }
    return sets;
  }

  void update(const WorldState& w) { update(w, sight_sets(w)); }

  // Called once per step on post-movement positions, before observations are built.
  void update(const WorldState& w, const std::vector<std::vector<int>>& sight) {
    std::vector<int> sighters;
    for (int e = 0; e < n_enemies_; ++e) {
      if (!w.enemy(e).alive) continue;
      const int fo = first_observer_[static_cast<std::size_t>(e)];
      if (fo >= 0 && w.ally(fo).alive) continue;

      sighters.clear();
      for (int i = 0; i < n_agents_; ++i) {
        if (!w.ally(i).alive) continue;
        const auto& s = sight[static_cast<std::size_t>(i)];
        if (std::find(s.begin(), s.end(), e) != s.end()) sighters.push_back(i);
      }
      if (sighters.empty()) continue;

      const int observer = sighters[static_cast<std::size_t>(rng_.below(sighters.size()))];
      first_observer_[static_cast<std::size_t>(e)] = observer;
      for (int i = 0; i < n_agents_; ++i) {
        if (i == observer) {
          verdict_[index(i, e)] = Verdict::granted;
        } else {
          verdict_[index(i, e)] = rng_.bernoulli(p_) ? Verdict::granted : Verdict::denied;
        }
      }
    }
  }

  // Verdicts as a row-major agent x enemy matrix of 0 (undetermined),
  // 1 (granted), 2 (denied), plus the first observer per enemy (-1 if none).
  nlohmann::json to_json() const {
    nlohmann::json v = nlohmann::json::array();
    for (int i = 0; i < n_agents_; ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (int e = 0; e < n_enemies_; ++e) row.push_back(static_cast<int>(verdict(i, e)));
      v.push_back(std::move(row));
    }
    return {{"verdict", std::move(v)}, {"first_observer", first_observer_}};
  }

 private:
  std::size_t index(int agent, int enemy) const { return static_cast<std::size_t>(agent * n_enemies_ + enemy); }

  double p_;
  int n_agents_;
  int n_enemies_;
  std::vector<Verdict> verdict_;
  std::vector<int> first_observer_;
  Rng rng_;
};

}  // namespace smacsim
