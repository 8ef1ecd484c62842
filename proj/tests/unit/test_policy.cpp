#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace smacsim;
using smacsim::testing::fixed_spec;
using smacsim::testing::make_world;
using smacsim::testing::raw_world;
using smacsim::testing::step_all;

TEST(FocusFire, EveryoneTargetsTheWeakestVisibleEnemy) {
  auto spec = fixed_spec(Race::protoss, {UnitType::stalker, UnitType::stalker, UnitType::zealot},
                         {UnitType::stalker, UnitType::stalker}, {{10, 10}, {10, 13}, {4, 4}}, {{15, 10}, {15, 13}});
  WorldState w = make_world(spec);
  w.units[4].shield = 20.0;
  EXPECT_EQ(scripted_focus_fire(w, 0), Action::attack(1));
  EXPECT_EQ(scripted_focus_fire(w, 1), Action::attack(1));
  // the zealot is out of range and walks toward the target (15, 13)
  const Action z = scripted_focus_fire(w, 2);
  EXPECT_TRUE(z.kind == ActionKind::move_north || z.kind == ActionKind::move_east);
}

TEST(FocusFire, DeadAgentNoOpsAndNoEnemyStops) {
  auto spec = fixed_spec(Race::terran, {UnitType::marine}, {UnitType::marine}, {{10, 10}}, {{14, 10}});
  WorldState w = make_world(spec);
  w.units[1].alive = false;
  w.units[1].health = 0.0;
  EXPECT_EQ(scripted_focus_fire(w, 0), Action::stop());
  w.units[0].alive = false;
  EXPECT_EQ(scripted_focus_fire(w, 0), Action::no_op());
}

TEST(Kite, BacksOffWhileReloading) {
  WorldState w = raw_world({UnitType::stalker}, {UnitType::zealot}, {{10, 16}}, {{14, 16}});
  EXPECT_EQ(scripted_kite(w, 0), Action::attack(0));
  w.units[0].cooldown_remaining = 1;
  EXPECT_EQ(scripted_kite(w, 0).kind, ActionKind::move_west);
  w.units[1].position = {17, 16};
  EXPECT_EQ(scripted_kite(w, 0).kind, ActionKind::move_east);
}

// Stalker (range 6, cooldown 2, speed 1) against a pursuing zergling (range 2,
// speed 1, 35 hp) that starts 6 away. Attack on odd steps, step back on even
// ones: the gap goes 6, 5, 4, 4 and the zergling dies to the third shot on
// step 5 without ever reaching attack range.
TEST(Kite, KillsAZerglingWithoutTakingDamage) {
  WorldState w = raw_world({UnitType::stalker}, {UnitType::zergling}, {{10, 16}}, {{16, 16}});
  const std::vector<double> gaps = {5.0, 5.0, 4.0, 4.0};
  StepOptions opt;
  for (int t = 1; !w.terminated; ++t) {
    ASSERT_LE(t, 5);
    const Action a = scripted_kite(w, 0);
    EXPECT_EQ(a.kind, t % 2 == 1 ? ActionKind::attack : ActionKind::move_west) << "step " << t;
    step_all(w, {a}, opt);
    if (t < 5) { EXPECT_DOUBLE_EQ(distance(w.ally(0).position, w.enemy(0).position), gaps[static_cast<std::size_t>(t - 1)]); }
  }
  EXPECT_EQ(w.step, 5);
  EXPECT_TRUE(w.won);
  EXPECT_EQ(w.ally(0).health + w.ally(0).shield, 160.0);
}

TEST(Healer, MendsTheMostDamagedAllyInRange) {
  auto spec = fixed_spec(Race::terran, {UnitType::medivac, UnitType::marine, UnitType::marine},
                         {UnitType::marine}, {{10, 10}, {10, 12}, {12, 10}}, {{30, 30}});
  WorldState w = make_world(spec);
  EXPECT_EQ(scripted_focus_fire(w, 0), Action::stop());
  w.units[1].health = 40.0;
  w.units[2].health = 20.0;
  EXPECT_EQ(scripted_focus_fire(w, 0), Action::heal(2));
  EXPECT_EQ(scripted_kite(w, 0), Action::heal(2));
}

TEST(RandomPolicy, OnlyPicksAvailableActions) {
  Env env(find_scenario("terran_10_vs_11"));
  RandomPolicy pol;
  Rng rng(1);
  for (std::uint64_t s = 0; s < 5; ++s) {
    env.reset(s);
    int t = 0;
    while (!env.terminated()) {
      std::vector<int> ids;
      for (int a = 0; a < 10; ++a) {
        const auto av = env.get_avail_agent_actions(a);
        const int id = pol.act({env, a, t, av}, rng);
        ASSERT_TRUE(av[static_cast<std::size_t>(id)]);
        ids.push_back(id);
      }
      env.step(std::span<const int>(ids));
      ++t;
    }
  }
}

TEST(OpenLoop, IgnoresEverythingButTimeAndAgent) {
  OpenLoopPolicy p;
  p.set(0, 0, {{2, 0.5}, {3, 0.5}});
  p.set(1, 0, {{6, 1.0}});
  Env a(find_scenario("protoss_5_vs_5")), b(find_scenario("protoss_5_vs_5"));
  a.reset(1);
  b.reset(2);
  std::vector<bool> all(static_cast<std::size_t>(a.n_actions()), true);
  all[0] = false;
  for (int rep = 0; rep < 20; ++rep) {
    Rng r1(rep), r2(rep);
    EXPECT_EQ(p.act({a, 0, 0, all}, r1), p.act({b, 0, 0, all}, r2));
  }
  Rng rng(3);
  EXPECT_EQ(p.choose(1, 0, all, rng), 6);
  // unavailable mass is renormalized away, and unseen keys stop
  auto no_attack = all;
  no_attack[6] = false;
  EXPECT_EQ(p.choose(1, 0, no_attack, rng), 1);
  EXPECT_EQ(p.choose(7, 2, all, rng), 1);
  std::vector<bool> dead(all.size(), false);
  dead[0] = true;
  EXPECT_EQ(p.choose(7, 2, dead, rng), 0);
  auto only_south = all;
  only_south[2] = false;
  for (int k = 0; k < 10; ++k) EXPECT_EQ(p.choose(0, 0, only_south, rng), 3);
}

TEST(OpenLoop, SamplesItsDistribution) {
  OpenLoopPolicy p;
  p.set(0, 0, {{2, 0.25}, {3, 0.75}});
  std::vector<bool> all(12, true);
  Rng rng(5);
  int south = 0;
  for (int k = 0; k < 20000; ++k) south += p.choose(0, 0, all, rng) == 3 ? 1 : 0;
  EXPECT_NEAR(south / 20000.0, 0.75, 0.015);
}

TEST(OpenLoop, JsonRoundTrip) {
  OpenLoopPolicy p;
  p.set(0, 0, {{2, 0.5}, {3, 0.5}});
  p.set(4, 3, {{7, 1.0}});
  const auto q = OpenLoopPolicy::from_json(nlohmann::json::parse(p.to_json().dump()));
  EXPECT_EQ(q.table(), p.table());
  EXPECT_THROW(OpenLoopPolicy::from_json(nlohmann::json::array()), ConfigError);
}

TEST(Policies, FactoryAndClone) {
  for (const char* n : {"random", "stop", "focus_fire", "kite"}) {
    auto p = make_policy(n);
    EXPECT_EQ(p->name(), n);
    EXPECT_EQ(p->clone()->name(), n);
  }
  EXPECT_THROW(make_policy("genius"), ConfigError);
}
