#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace smacsim;
using smacsim::testing::fixed_spec;
using smacsim::testing::make_world;
using smacsim::testing::step_all;

namespace {

std::vector<Action> pursuit(const WorldState& w) {
  Rng rng(0);
  return PursuitOpponent{}.act(w, rng);
}

}  // namespace

TEST(Pursuit, AttacksTheNearestAllyInRange) {
  auto spec = fixed_spec(Race::zerg, {UnitType::zergling, UnitType::zergling}, {UnitType::hydralisk},
                         {{10, 10}, {13, 10}}, {{16, 10}});
  const WorldState w = make_world(spec);
  EXPECT_EQ(pursuit(w), (std::vector<Action>{Action::attack(1)}));
}

TEST(Pursuit, ClosesDistanceByMoveSpeed) {
  auto spec = fixed_spec(Race::terran, {UnitType::marine}, {UnitType::marauder}, {{5, 10}}, {{20, 10}});
  WorldState w = make_world(spec);
  EXPECT_EQ(pursuit(w)[0].kind, ActionKind::move_west);
  StepOptions opt;
  step_all(w, {Action::stop()}, opt);
  EXPECT_DOUBLE_EQ(w.enemy(0).position.x, 20.0 - 0.75);
  EXPECT_EQ(w.enemy(0).facing, (Vec2{-1.0, 0.0}));
}

// A retreating ally of equal speed keeps a constant gap: the opponent never
// predicts and never stops chasing.
TEST(Pursuit, CanBeLuredAtEqualSpeed) {
  auto spec = fixed_spec(Race::zerg, {UnitType::zergling}, {UnitType::zergling}, {{25, 16}}, {{31, 16}});
  WorldState w = make_world(spec);
  for (int t = 0; t < 20; ++t) {
    step_all(w, {Action{ActionKind::move_west, -1}}, StepOptions{});
    EXPECT_DOUBLE_EQ(distance(w.ally(0).position, w.enemy(0).position), 6.0);
  }
  EXPECT_DOUBLE_EQ(w.enemy(0).position.x, 11.0);
}

TEST(Pursuit, StopsWhenNoAllyIsLeft) {
  auto spec = fixed_spec(Race::terran, {UnitType::marine}, {UnitType::marine, UnitType::marine}, {{5, 10}},
                         {{20, 10}, {20, 14}});
  WorldState w = make_world(spec);
  w.units[0].alive = false;
  w.units[0].health = 0.0;
  w.units[2].alive = false;
  w.units[2].health = 0.0;
  EXPECT_EQ(pursuit(w), (std::vector<Action>{Action::stop(), Action::no_op()}));
}

TEST(Pursuit, HealerMendsOrFollows) {
  auto spec = fixed_spec(Race::terran, {UnitType::marine}, {UnitType::marine, UnitType::marine, UnitType::medivac},
                         {{2, 2}}, {{20, 10}, {28, 10}, {22, 10}});
  WorldState w = make_world(spec);
  auto a = pursuit(w);
  // nobody hurt: trail the centroid (24, 10)
  EXPECT_EQ(a[2].kind, ActionKind::move_east);
  w.units[2].health = 30.0;  // enemy 1, out of heal range
  EXPECT_EQ(pursuit(w)[2].kind, ActionKind::move_east);
  w.units[1].health = 30.0;  // enemy 0, distance 2
  EXPECT_EQ(pursuit(w)[2], Action::heal(0));
}

TEST(Pursuit, OutputIsDeterministic) {
  const WorldState w = make_world(find_scenario("zerg_10_vs_11"), 9);
  EXPECT_EQ(pursuit(w), pursuit(w));
  for (const auto& a : pursuit(w)) EXPECT_NE(a.kind, ActionKind::no_op);
}

TEST(Opponents, Factory) {
  EXPECT_EQ(make_opponent("pursuit")->name(), "pursuit");
  EXPECT_EQ(make_opponent("idle")->name(), "idle");
  EXPECT_THROW(make_opponent("smart"), ConfigError);
}

TEST(Opponents, InvalidScriptedActionBecomesNoOp) {
  auto spec = fixed_spec(Race::terran, {UnitType::marine}, {UnitType::marine}, {{5, 10}}, {{20, 10}});
  WorldState w = make_world(spec);
  const ScriptedOpponent bad("bad", [](const WorldState&, Rng&) { return std::vector<Action>{Action::attack(0)}; });
  StepOptions opt;
  opt.opponent = &bad;
  step_all(w, {Action::stop()}, opt);
  EXPECT_EQ(w.ally(0).health, 45.0);
  EXPECT_EQ(w.enemy(0).last_action, 0);
  const ScriptedOpponent short_("short", [](const WorldState&, Rng&) { return std::vector<Action>{}; });
  opt.opponent = &short_;
  EXPECT_THROW(step_all(w, {Action::stop()}, opt), ActionError);
}
