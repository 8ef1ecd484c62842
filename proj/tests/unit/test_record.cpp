#include <gtest/gtest.h>

#include <sstream>

#include "helpers.hpp"

using namespace smacsim;

namespace {

EpisodeRecord sample_record(const std::string& scenario, const std::string& policy, std::uint64_t seed,
                            RecordOptions opt = RecordOptions::full()) {
  Env env(find_scenario(scenario));
  auto p = make_policy(policy);
  return run_episode(env, *p, seed, opt);
}

}  // namespace

TEST(Record, JsonlRoundTripPreservesEverything) {
  const auto rec = sample_record("protoss_5_vs_5", "random", 3);
  std::istringstream is(to_jsonl(rec));
  const auto back = read_jsonl(is);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(to_jsonl(back[0]), to_jsonl(rec));
  EXPECT_EQ(record_hash(back[0]), record_hash(rec));
  EXPECT_EQ(back[0].length(), rec.length());
  EXPECT_EQ(back[0].steps.back().obs, rec.steps.back().obs);
  EXPECT_EQ(back[0].instance.ally_positions, rec.instance.ally_positions);
}

TEST(Record, SeveralEpisodesInOneStream) {
  std::ostringstream os;
  for (std::uint64_t s = 0; s < 3; ++s) write_jsonl(os, sample_record("zerg_5_vs_5", "focus_fire", s, {}));
  std::istringstream is(os.str());
  const auto back = read_jsonl(is);
  ASSERT_EQ(back.size(), 3u);
  for (std::uint64_t s = 0; s < 3; ++s) EXPECT_EQ(back[s].seed, s);
}

TEST(Record, SameSeedSameBytes) {
  EXPECT_EQ(to_jsonl(sample_record("terran_5_vs_5", "random", 8)), to_jsonl(sample_record("terran_5_vs_5", "random", 8)));
  EXPECT_NE(record_hash(sample_record("terran_5_vs_5", "random", 8)),
            record_hash(sample_record("terran_5_vs_5", "random", 9)));
}

TEST(Record, MonteCarloTargets) {
  auto rec = sample_record("protoss_5_vs_5", "focus_fire", 2, {});
  const double g = 0.99;
  // independent forward computation of each discounted return
  for (int t = 0; t < rec.length(); ++t) {
    double ret = 0.0;
    double disc = 1.0;
    for (int k = t; k < rec.length(); ++k) {
      ret += disc * rec.steps[static_cast<std::size_t>(k)].reward;
      disc *= g;
    }
    EXPECT_NEAR(rec.steps[static_cast<std::size_t>(t)].target, ret, 1e-9);
  }
  EXPECT_EQ(rec.steps.back().target, rec.steps.back().reward);
  assign_mc_targets(rec, 0.0);
  for (const auto& s : rec.steps) EXPECT_EQ(s.target, s.reward);
  double total = 0.0;
  for (const auto& s : rec.steps) total += s.reward;
  EXPECT_NEAR(total, rec.total_return, 1e-12);
}

TEST(Record, ExternalTargets) {
  auto rec = sample_record("protoss_5_vs_5", "stop", 0, {});
  std::vector<double> v(static_cast<std::size_t>(rec.length()), 0.25);
  assign_external_targets(rec, v);
  for (const auto& s : rec.steps) EXPECT_EQ(s.target, 0.25);
  v.pop_back();
  EXPECT_THROW(assign_external_targets(rec, v), ConfigError);
}

TEST(Replay, ReproducesRecordedEpisodes) {
  for (const char* sc : {"protoss_5_vs_5", "zerg_10_vs_11", "epo_terran_6_vs_5"}) {
    for (const char* pol : {"random", "focus_fire"}) {
      const auto rep = replay(sample_record(sc, pol, 4));
      EXPECT_TRUE(rep.ok) << sc << " " << pol << ": " << rep.message;
    }
  }
}

TEST(Replay, TamperedActionDivergesAtThatStep) {
  auto rec = sample_record("protoss_5_vs_5", "focus_fire", 6, {});
  ASSERT_GT(rec.length(), 4);
  int& a = rec.steps[3].actions[0];
  a = a == 1 ? 2 : 1;
  const auto rep = replay(rec);
  EXPECT_FALSE(rep.ok);
  ASSERT_TRUE(rep.first_divergent_step.has_value());
  EXPECT_EQ(*rep.first_divergent_step, 3);
}

TEST(Replay, RejectedActionIsADivergence) {
  auto rec = sample_record("protoss_5_vs_5", "focus_fire", 6, {});
  rec.steps[0].actions[0] = 0;  // no_op for a living agent
  const auto rep = replay(rec);
  EXPECT_FALSE(rep.ok);
  EXPECT_EQ(rep.first_divergent_step, 0);
}

TEST(Replay, TamperedRewardAndTruncation) {
  auto rec = sample_record("terran_5_vs_5", "random", 1, {});
  auto bad = rec;
  bad.steps[2].reward += 1e-9;
  EXPECT_EQ(replay(bad).first_divergent_step, 2);
  bad = rec;
  bad.steps.pop_back();
  EXPECT_FALSE(replay(bad).ok);
}

TEST(Replay, StatVersionMismatchIsFlagged) {
  const auto rec = sample_record("protoss_5_vs_5", "random", 1, {});
  auto stats = StatTable::defaults();
  stats.version = "units-v2";
  const auto rep = replay(rec, std::make_shared<const StatTable>(stats));
  EXPECT_TRUE(rep.version_mismatch);
  EXPECT_FALSE(rep.ok);
  EXPECT_NE(rep.message.find("units-v1"), std::string::npos);
}

TEST(ReadJsonl, ErrorsNameTheLine) {
  const auto text = to_jsonl(sample_record("protoss_5_vs_5", "random", 1, {}));
  // drop the last step line: the header's step count no longer matches
  const auto cut = text.substr(0, text.rfind('\n', text.size() - 2) + 1);
  std::istringstream truncated(cut);
  EXPECT_THROW(read_jsonl(truncated), ConfigError);
  std::istringstream garbage(text.substr(0, text.find('\n') + 1) + "{\"t\": 0, oops\n");
  try {
    read_jsonl(garbage);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  std::istringstream orphan("{\"t\": 0}\n");
  EXPECT_THROW(read_jsonl(orphan), ConfigError);
}
