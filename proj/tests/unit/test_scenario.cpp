#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "helpers.hpp"

using namespace smacsim;

namespace {

std::map<UnitType, double> frequencies(const std::vector<UnitType>& draws) {
  std::map<UnitType, double> f;
  for (UnitType t : draws) f[t] += 1.0;
  for (auto& [t, v] : f) v /= static_cast<double>(draws.size());
  return f;
}

}  // namespace

TEST(Registry, HoldsTheEighteenScenarios) {
  const auto& reg = registry();
  ASSERT_EQ(reg.size(), 18u);
  for (const char* race : {"protoss", "terran", "zerg"})
    for (const char* size : {"5_vs_5", "10_vs_10", "20_vs_20", "10_vs_11", "20_vs_23"})
      EXPECT_NO_THROW(find_scenario(std::string(race) + "_" + size));
  for (const auto& s : reg) EXPECT_NO_THROW(s.validate()) << s.name;
}

TEST(Registry, Lookups) {
  const auto& p = find_scenario("protoss_20_vs_23");
  EXPECT_EQ(p.n_allies, 20);
  EXPECT_EQ(p.n_enemies, 23);
  EXPECT_EQ(p.race.race, Race::protoss);

  const auto& t = find_scenario("terran_5_vs_5");
  EXPECT_EQ(t.n_allies, t.n_enemies);
  EXPECT_EQ(t.race.race, Race::terran);
  EXPECT_FALSE(t.epo_p.has_value());
  EXPECT_TRUE(t.avail_mask_enabled);

  const auto& e = find_scenario("epo_zerg_6_vs_5");
  EXPECT_EQ(e.n_allies, 6);
  EXPECT_EQ(e.n_enemies, 5);
  ASSERT_TRUE(e.epo_p.has_value());
  EXPECT_EQ(*e.epo_p, 0.0);
  EXPECT_FALSE(e.avail_mask_enabled);

  EXPECT_THROW(find_scenario("protoss_3_vs_3"), ConfigError);
}

TEST(Registry, EpisodeLimitsFollowTeamSize) {
  EXPECT_EQ(find_scenario("zerg_5_vs_5").episode_limit, 100);
  EXPECT_EQ(find_scenario("zerg_10_vs_11").episode_limit, 150);
  EXPECT_EQ(find_scenario("zerg_20_vs_23").episode_limit, 200);
}

TEST(SampleTeam, ZergFrequenciesOver100kDraws) {
  Rng rng(0);
  const auto f = frequencies(sample_team(RaceConfig::standard(Race::zerg), 100000, rng));
  EXPECT_NEAR(f.at(UnitType::zergling), 0.45, 0.01);
  EXPECT_NEAR(f.at(UnitType::hydralisk), 0.45, 0.01);
  EXPECT_NEAR(f.at(UnitType::baneling), 0.10, 0.01);
}

TEST(SampleTeam, ForcedSpecialDraw) {
  RaceConfig only_special{Race::protoss, {{UnitType::stalker, 0.0}, {UnitType::zealot, 0.0}, {UnitType::colossus, 1.0}}};
  Rng rng(3);
  EXPECT_EQ(sample_team(only_special, 1, rng), std::vector<UnitType>{UnitType::colossus});
}

TEST(SampleTeam, RaceConfigValidation) {
  RaceConfig bad = RaceConfig::standard(Race::terran);
  bad.unit_probs[0].second = 0.5;
  EXPECT_THROW(bad.validate(), ConfigError);
  RaceConfig mixed{Race::terran, {{UnitType::marine, 0.5}, {UnitType::zergling, 0.5}}};
  EXPECT_THROW(mixed.validate(), ConfigError);
}

TEST(SampleEnemyTeam, CopiesAlliesAndAppendsExtras) {
  Rng rng(11);
  const RaceConfig race = RaceConfig::standard(Race::terran);
  const auto allies = sample_team(race, 10, rng);
  const auto enemies = sample_enemy_team(allies, 11, race, rng);
  ASSERT_EQ(enemies.size(), 11u);
  EXPECT_TRUE(std::equal(allies.begin(), allies.end(), enemies.begin()));
  EXPECT_EQ(sample_enemy_team(allies, 10, race, rng), allies);
  EXPECT_THROW(sample_enemy_team(allies, 9, race, rng), ScenarioError);
}

TEST(SampleEnemyTeam, ExtraSlotsFollowTheRaceDistribution) {
  Rng rng(12);
  const RaceConfig race = RaceConfig::standard(Race::protoss);
  std::vector<UnitType> extras;
  const std::vector<UnitType> allies(20, UnitType::zealot);
  for (int i = 0; i < 10000; ++i) {
    const auto e = sample_enemy_team(allies, 23, race, rng);
    extras.insert(extras.end(), e.begin() + 20, e.end());
  }
  const auto f = frequencies(extras);
  EXPECT_NEAR(f.at(UnitType::stalker), 0.45, 0.01);
  EXPECT_NEAR(f.at(UnitType::zealot), 0.45, 0.01);
  EXPECT_NEAR(f.at(UnitType::colossus), 0.10, 0.01);
}

TEST(SampleInstance, SymmetricScenariosHaveEqualMultisets) {
  for (const char* name : {"protoss_5_vs_5", "terran_10_vs_10", "zerg_20_vs_20"}) {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const auto inst = sample_instance(find_scenario(name), seed);
      auto a = inst.ally_types, e = inst.enemy_types;
      std::sort(a.begin(), a.end());
      std::sort(e.begin(), e.end());
      ASSERT_EQ(a, e) << name << " seed " << seed;
    }
  }
}

TEST(SampleInstance, EpoScenariosGiveTheAlliesTheExtraUnit) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto inst = sample_instance(find_scenario("epo_terran_6_vs_5"), seed);
    ASSERT_EQ(inst.ally_types.size(), 6u);
    ASSERT_EQ(inst.enemy_types.size(), 5u);
    EXPECT_TRUE(std::equal(inst.enemy_types.begin(), inst.enemy_types.end(), inst.ally_types.begin()));
  }
}

TEST(SampleInstance, SameSeedSameInstance) {
  const auto& spec = find_scenario("zerg_10_vs_11");
  EXPECT_EQ(to_json(sample_instance(spec, 5)), to_json(sample_instance(spec, 5)));
  EXPECT_NE(to_json(sample_instance(spec, 5)), to_json(sample_instance(spec, 6)));
}

TEST(SamplePositions, ReflectIsAnExactMirror) {
  const SpawnGeometry g;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    Rng rng(seed);
    const auto pos = sample_positions(SpawnKind::reflect(), 10, 10, 32.0, 32.0, g, rng);
    for (std::size_t i = 0; i < 10; ++i) {
      ASSERT_EQ(pos.enemies[i].x + pos.allies[i].x, 32.0);
      ASSERT_EQ(pos.enemies[i].y, pos.allies[i].y);
      ASSERT_LT(pos.allies[i].x, 16.0);
      ASSERT_GE(pos.allies[i].x, g.margin);
    }
  }
}

TEST(SamplePositions, ReflectExtrasStayOnTheEnemyHalf) {
  Rng rng(4);
  const auto pos = sample_positions(SpawnKind::reflect(), 20, 23, 32.0, 32.0, SpawnGeometry{}, rng);
  for (std::size_t i = 20; i < 23; ++i) EXPECT_GT(pos.enemies[i].x, 16.0);
}

// Kolmogorov-Smirnov statistic of the first ally's x against the uniform law
// on [margin, width/2 - separation/2]. The first placement is never rejected,
// so it is exactly the proposal distribution.
TEST(SamplePositions, ReflectAllyXIsUniform) {
  const SpawnGeometry g;
  const double lo = g.margin, hi = 16.0 - g.min_separation / 2.0;
  std::vector<double> xs;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Rng rng(derive_seed(seed, Stream::scenario));
    xs.push_back(sample_positions(SpawnKind::reflect(), 5, 5, 32.0, 32.0, g, rng).allies[0].x);
  }
  std::sort(xs.begin(), xs.end());
  double d = 0.0;
  const auto n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double cdf = (xs[i] - lo) / (hi - lo);
    d = std::max({d, std::abs(cdf - static_cast<double>(i) / n), std::abs(static_cast<double>(i + 1) / n - cdf)});
  }
  EXPECT_LT(d, 1.63 / std::sqrt(n));  // 1% critical value
}

TEST(SamplePositions, SurroundPutsOneEnemyPerDiagonal) {
  const SpawnGeometry g;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    const auto pos = sample_positions(SpawnKind::surround(), 5, 4, 32.0, 32.0, g, rng);
    int quadrant_seen[4] = {0, 0, 0, 0};
    for (const Vec2& e : pos.enemies) {
      const Vec2 d = e - Vec2{16.0, 16.0};
      // radial part along the diagonal, lateral part across it
      const double along = (std::abs(d.x) + std::abs(d.y)) / std::numbers::sqrt2;
      const double across = (std::abs(d.x) - std::abs(d.y)) / std::numbers::sqrt2;
      EXPECT_GE(along, 8.0 - 1e-9);
      EXPECT_LE(along, 12.0 + 1e-9);
      EXPECT_LE(std::abs(across), 2.0 + 1e-9);
      ++quadrant_seen[(d.x > 0 ? 0 : 1) + (d.y > 0 ? 0 : 2)];
    }
    for (int q : quadrant_seen) EXPECT_EQ(q, 1);
    for (const Vec2& a : pos.allies) EXPECT_LE(distance(a, {16.0, 16.0}), 4.0 + 1e-9);
  }
}

TEST(SamplePositions, BoundsAndSeparationHoldForEveryKind) {
  const SpawnGeometry g;
  for (auto kind : {SpawnKind::reflect(), SpawnKind::surround(), SpawnKind::mixed()}) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      Rng rng(seed);
      const auto pos = sample_positions(kind, 20, 23, 32.0, 32.0, g, rng);
      std::vector<Vec2> all = pos.allies;
      all.insert(all.end(), pos.enemies.begin(), pos.enemies.end());
      for (std::size_t i = 0; i < all.size(); ++i) {
        ASSERT_TRUE(inside_map(all[i], 32.0, 32.0));
        for (std::size_t j = i + 1; j < all.size(); ++j) ASSERT_GE(distance(all[i], all[j]), g.min_separation);
      }
    }
  }
}

TEST(SamplePositions, MixedUsesBothLayouts) {
  int mirrored = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    const auto pos = sample_positions(SpawnKind::mixed(), 5, 5, 32.0, 32.0, SpawnGeometry{}, rng);
    mirrored += pos.enemies[0].x + pos.allies[0].x == 32.0 && pos.enemies[0].y == pos.allies[0].y;
  }
  EXPECT_GT(mirrored, 70);
  EXPECT_LT(mirrored, 130);
}

TEST(SamplePositions, UnsatisfiableSeparationFails) {
  SpawnGeometry g;
  g.min_separation = 3.0;
  g.max_attempts = 50;
  Rng rng(1);
  EXPECT_THROW(sample_positions(SpawnKind::reflect(), 40, 40, 8.0, 8.0, g, rng), ScenarioError);
}

TEST(CustomDistribution, RegisteredSamplerIsUsedVerbatim) {
  DistributionRegistry reg;
  const std::vector<Vec2> line_a = {{4, 4}, {4, 6}, {4, 8}};
  const std::vector<Vec2> line_e = {{20, 4}, {20, 6}, {20, 8}};
  reg.register_spawn("fixed_line", [&](const ScenarioSpec&, Rng&) { return SpawnPositions{line_a, line_e}; });
  ScenarioSpec s = make_scenario(Race::terran, 3, 3);
  s.spawn = SpawnKind::named("fixed_line");
  const auto inst = sample_instance(s, 9, reg);
  EXPECT_EQ(inst.ally_positions, line_a);
  EXPECT_EQ(inst.enemy_positions, line_e);
  EXPECT_THROW(reg.register_spawn("fixed_line", [&](const ScenarioSpec&, Rng&) { return SpawnPositions{}; }),
               ConfigError);
  EXPECT_THROW(sample_instance(s, 9, DistributionRegistry{}), ConfigError);
}

TEST(CustomDistribution, SeededSamplerIsReproducible) {
  DistributionRegistry reg;
  reg.register_spawn("jitter", [](const ScenarioSpec& spec, Rng& rng) {
    SpawnPositions p;
    for (int i = 0; i < spec.n_allies; ++i) p.allies.push_back({2.0 + 3.0 * i, rng.uniform(2.0, 30.0)});
    for (int i = 0; i < spec.n_enemies; ++i) p.enemies.push_back({28.0 - 3.0 * i, rng.uniform(2.0, 30.0)});
    return p;
  });
  reg.register_team("all_marines", [](const ScenarioSpec& spec, Rng&) {
    return Teams{std::vector<UnitType>(static_cast<std::size_t>(spec.n_allies), UnitType::marine),
                 std::vector<UnitType>(static_cast<std::size_t>(spec.n_enemies), UnitType::marine)};
  });
  ScenarioSpec s = make_scenario(Race::terran, 4, 4);
  s.spawn = SpawnKind::named("jitter");
  s.team = TeamKind::named("all_marines");
  EXPECT_EQ(to_json(sample_instance(s, 2, reg)), to_json(sample_instance(s, 2, reg)));
  EXPECT_EQ(sample_instance(s, 2, reg).enemy_types, std::vector<UnitType>(4, UnitType::marine));
}

TEST(ScenarioJson, SpecAndInstanceRoundTrip) {
  for (const auto& spec : registry()) {
    const ScenarioSpec back = scenario_from_json(to_json(spec));
    EXPECT_EQ(to_json(back), to_json(spec));
    const auto inst = sample_instance(spec, 17);
    EXPECT_EQ(to_json(instance_from_json(to_json(inst))), to_json(inst));
  }
  const auto fixed = smacsim::testing::fixed_protoss_5v5();
  EXPECT_EQ(to_json(scenario_from_json(to_json(fixed))), to_json(fixed));
}

TEST(ScenarioJson, ErrorsNameTheField) {
  try {
    scenario_from_json({{"name", "x"}, {"n_allies", "five"}});
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("scenario.n_allies"), std::string::npos);
  }
  EXPECT_THROW(scenario_from_json({{"name", "x"}, {"spawn", {{"kind", "spiral"}}}}), ConfigError);
  EXPECT_THROW(scenario_from_json({{"name", "x"}, {"bogus", 1}}), ConfigError);
  EXPECT_THROW(scenario_from_json({{"base", "nope_1_vs_1"}}), ConfigError);
  const ScenarioSpec derived = scenario_from_json({{"base", "zerg_5_vs_5"}, {"name", "zerg_reflect"}, {"spawn", {{"kind", "reflect"}}}});
  EXPECT_EQ(derived.race.race, Race::zerg);
  EXPECT_EQ(derived.spawn.kind, SpawnKind::Kind::reflect);
}

TEST(ScenarioSpec, FixedSpawnOutsideMapIsRejected) {
  EXPECT_THROW(smacsim::testing::fixed_spec(Race::terran, {UnitType::marine}, {UnitType::marine}, {{-1.0, 3.0}}, {{5.0, 5.0}}),
               ConfigError);
}
