#pragma once

// Policy evaluation, open-loop fitting, regression datasets and the
// feature-mask suite.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "smacsim/parallel.hpp"
#include "smacsim/record.hpp"
#include "smacsim/regression.hpp"

namespace smacsim {

// ---------------------------------------------------------------------------
// Rollouts and evaluation

// Episode i uses seed episode_seed(seed, first + i). Records come back in
// index order whatever the number of jobs.
inline std::vector<EpisodeRecord> collect(const Policy& policy, const ScenarioSpec& spec, int n_episodes,
                                          std::uint64_t seed, const EnvConfig& cfg = {}, int jobs = 1,
                                          const RecordOptions& opt = {}, int first = 0) {
  if (n_episodes <= 0) throw ConfigError("episode count must be positive");
  std::vector<EpisodeRecord> out(static_cast<std::size_t>(n_episodes));
  parallel_for(out.size(), jobs, [&](std::size_t i) {
    Env env(spec, cfg);
    auto p = policy.clone();
    out[i] = run_episode(env, *p, episode_seed(seed, static_cast<std::uint64_t>(first) + i), opt);
  });
  return out;
}

struct EvalResult {
  int episodes = 0;
  int wins = 0;
  double win_rate = 0.0;
  double mean_return = 0.0;
  std::vector<double> returns;
};

inline EvalResult summarize(const std::vector<EpisodeRecord>& recs) {
  EvalResult r;
  r.episodes = static_cast<int>(recs.size());
  for (const auto& rec : recs) {
    r.wins += rec.won;
    r.returns.push_back(rec.total_return);
  }
  if (r.episodes > 0) {
    r.win_rate = static_cast<double>(r.wins) / r.episodes;
    double s = 0.0;
    for (double v : r.returns) s += v;
    r.mean_return = s / r.episodes;
  }
  return r;
}

inline EvalResult evaluate(const Policy& policy, const ScenarioSpec& spec, int n_episodes = 20, std::uint64_t seed = 0,
                           const EnvConfig& cfg = {}, int jobs = 1) {
  return summarize(collect(policy, spec, n_episodes, seed, cfg, jobs));
}

// Empirical action distribution per (timestep, agent) over the records.
inline OpenLoopPolicy fit_openloop(const std::vector<EpisodeRecord>& records) {
  if (records.empty()) throw ConfigError("fit_openloop: no records");
  std::map<OpenLoopPolicy::Key, std::map<int, int>> counts;
  for (const auto& rec : records)
    for (const auto& s : rec.steps)
      for (std::size_t a = 0; a < s.actions.size(); ++a) ++counts[{s.t, static_cast<int>(a)}][s.actions[a]];
  OpenLoopPolicy p;
  for (const auto& [key, c] : counts) {
    int total = 0;
    for (const auto& kv : c) total += kv.second;
    OpenLoopPolicy::Distribution d;
    for (const auto& [id, k] : c) d.emplace_back(id, static_cast<double>(k) / total);
    p.set(key.first, key.second, std::move(d));
  }
  return p;
}

// ---------------------------------------------------------------------------
// Regression datasets

enum class FeatureSource { observation, state };
enum class TargetKind { mc_return, external };

struct DatasetConfig {
  int n_train = 512;
  int n_val = 256;
  std::uint64_t seed = 0;
  double gamma = 0.99;
  FeatureSource source = FeatureSource::observation;
  TargetKind target = TargetKind::mc_return;
};

// Observation rows are one per living agent per step, with timestep and
// agent-id channels appended. State rows are one per step with only the
// timestep channels.
struct Dataset {
  FeatureLayout layout;
  bool own_exempt = true;
  FeatureSource source = FeatureSource::observation;
  Fold train;
  Fold val;
  nlohmann::json info = nlohmann::json::object();
};

namespace detail {

inline void append_rows(Fold& fold, const EpisodeRecord& rec, FeatureSource source, int episode_limit, int n_agents) {
  for (const auto& s : rec.steps) {
    if (source == FeatureSource::state) {
      if (s.state.empty()) throw ConfigError("dataset: record lacks state vectors");
      FeatureVector v = s.state;
      append_meta(v, s.t, episode_limit, -1, 0);
      fold.push(v, s.target);
      continue;
    }
    if (s.obs.empty() || s.avail.empty()) throw ConfigError("dataset: record lacks observations");
    for (int a = 0; a < n_agents; ++a) {
      if (s.avail[static_cast<std::size_t>(a)][0]) continue;  // only dead agents may no-op
      FeatureVector v = s.obs[static_cast<std::size_t>(a)];
      append_meta(v, s.t, episode_limit, a, n_agents);
      fold.push(v, s.target);
    }
  }
}

}  // namespace detail

// Records n_train + n_val episodes of `policy` (train first) and turns them
// into two folds. With TargetKind::external, `external` holds one target
// vector per episode in the same order, each as long as its episode.
inline Dataset export_regression_dataset(const Policy& policy, const ScenarioSpec& spec, const DatasetConfig& dc,
                                         const EnvConfig& cfg = {}, int jobs = 1,
                                         const std::vector<std::vector<double>>* external = nullptr) {
  if (dc.n_train <= 0 || dc.n_val <= 0) throw ConfigError("dataset: fold sizes must be positive");
  if (dc.target == TargetKind::external) {
    if (!external) throw ConfigError("dataset: external targets requested but none supplied");
    if (external->size() != static_cast<std::size_t>(dc.n_train + dc.n_val))
      throw ConfigError("external targets: expected " + std::to_string(dc.n_train + dc.n_val) + " episodes, got " +
                        std::to_string(external->size()));
  }

  RecordOptions opt;
  opt.gamma = dc.gamma;
  opt.observations = dc.source == FeatureSource::observation;
  opt.avail = opt.observations;
  opt.state = dc.source == FeatureSource::state;
  auto recs = collect(policy, spec, dc.n_train + dc.n_val, dc.seed, cfg, jobs, opt);
  if (dc.target == TargetKind::external)
    for (std::size_t i = 0; i < recs.size(); ++i) assign_external_targets(recs[i], (*external)[i]);

  Env probe(spec, cfg);
  Dataset ds;
  ds.source = dc.source;
  const int limit = probe.spec().episode_limit;
  const int n_agents = probe.spec().n_allies;
  if (dc.source == FeatureSource::observation) {
    ds.layout = probe.obs_layout().with_meta(limit, n_agents);
    ds.own_exempt = true;
  } else {
    ds.layout = probe.state_layout().with_meta(limit, 0);
    ds.own_exempt = false;
  }
  for (std::size_t i = 0; i < recs.size(); ++i)
    detail::append_rows(i < static_cast<std::size_t>(dc.n_train) ? ds.train : ds.val, recs[i], dc.source, limit,
                        n_agents);
  ds.train.dim = ds.val.dim = ds.layout.size();
  ds.info = {{"scenario", spec.name},
             {"policy", policy.name()},
             {"seed", dc.seed},
             {"gamma", dc.gamma},
             {"n_train", dc.n_train},
             {"n_val", dc.n_val},
             {"target", dc.target == TargetKind::mc_return ? "mc_return" : "external"},
             {"train_win_rate", summarize({recs.begin(), recs.begin() + dc.n_train}).win_rate}};
  return ds;
}

inline FeatureLayout layout_from_manifest(const nlohmann::json& m) {
  auto find = [](const auto& names, const std::string& s, const char* what) {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == s) return i;
    throw ConfigError(std::string("layout manifest: unknown ") + what + " '" + s + "'");
  };
  FeatureLayout l;
  l.kind = m.at("kind").get<std::string>() == "state" ? LayoutKind::state : LayoutKind::observation;
  for (const auto& f : m.at("features"))
    l.slots.push_back({f.at("name").get<std::string>(),
                       static_cast<Owner>(find(kOwnerNames, f.at("owner").get<std::string>(), "owner")),
                       f.at("entity").get<int>(),
                       static_cast<Attribute>(find(kAttributeNames, f.at("attribute").get<std::string>(), "attribute"))});
  return l;
}

// One header line, then {"fold":"train"|"val","x":[...],"y":...} per row.
// Features are written in shortest round-trip form.
inline void write_dataset(std::ostream& os, const Dataset& ds) {
  nlohmann::json header = {{"type", "dataset"},
                           {"source", ds.source == FeatureSource::state ? "state" : "observation"},
                           {"own_exempt", ds.own_exempt},
                           {"layout", ds.layout.manifest()},
                           {"info", ds.info}};
  os << header.dump() << '\n';
  char buf[64];
  auto write_fold = [&](const Fold& f, const char* name) {
    for (std::size_t r = 0; r < f.rows(); ++r) {
      os << "{\"fold\":\"" << name << "\",\"x\":[";
      const float* row = f.row(r);
      for (std::size_t c = 0; c < f.dim; ++c) {
        if (c) os << ',';
        auto res = std::to_chars(buf, buf + sizeof buf, row[c]);
        os.write(buf, res.ptr - buf);
      }
      auto res = std::to_chars(buf, buf + sizeof buf, f.y[r]);
      os << "],\"y\":";
      os.write(buf, res.ptr - buf);
      os << "}\n";
    }
  };
  write_fold(ds.train, "train");
  write_fold(ds.val, "val");
}

inline Dataset read_dataset(std::istream& is) {
  Dataset ds;
  std::string line;
  int lineno = 0;
  bool have_header = false;
  FeatureVector row;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      if (!have_header) {
        if (j.value("type", "") != "dataset") throw ConfigError("missing dataset header");
        ds.source = j.at("source").get<std::string>() == "state" ? FeatureSource::state : FeatureSource::observation;
        ds.own_exempt = j.at("own_exempt").get<bool>();
        ds.layout = layout_from_manifest(j.at("layout"));
        ds.info = j.value("info", nlohmann::json::object());
        ds.train.dim = ds.val.dim = ds.layout.size();
        have_header = true;
        continue;
      }
      const std::string fold = j.at("fold").get<std::string>();
      const auto& x = j.at("x");
      row.resize(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) row[i] = x[i].get<float>();
      if (fold == "train") ds.train.push(row, j.at("y").get<double>());
      else if (fold == "val") ds.val.push(row, j.at("y").get<double>());
      else throw ConfigError("unknown fold '" + fold + "'");
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("dataset line " + std::to_string(lineno) + ": " + e.what());
    } catch (const std::runtime_error& e) {
      throw ConfigError("dataset line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!have_header) throw ConfigError("dataset: empty input");
  return ds;
}

// ---------------------------------------------------------------------------
// Masked regression

enum class RegressorKind { ridge, mlp };

struct RegressorConfig {
  RegressorKind kind = RegressorKind::ridge;
  double lambda = 1e-3;
  MlpConfig mlp;
};

// Masked columns are dropped, which is the same as zeroing them for both
// regressors. Timestep and agent-id channels are never masked; the timestep
// channels are also exempt from the ridge penalty.
inline ColumnPlan column_plan(const FeatureLayout& layout, const FeatureMask& mask, bool own_exempt) {
  ColumnPlan plan{std::vector<char>(layout.size()), std::vector<char>(layout.size())};
  for (std::size_t i = 0; i < layout.size(); ++i) {
    plan.use[i] = !masks_slot(layout[i], mask, own_exempt);
    plan.penalize[i] = layout[i].attribute != Attribute::timestep;
  }
  return plan;
}

inline RegressionMetrics masked_regression(const Dataset& ds, const FeatureMask& mask, const RegressorConfig& rc = {}) {
  if (ds.train.rows() == 0 || ds.val.rows() == 0) throw RegressionError("masked_regression: empty fold");
  if (ds.train.dim != ds.layout.size()) throw LayoutError("dataset width does not match its layout");
  const ColumnPlan plan = column_plan(ds.layout, mask, ds.own_exempt);
  std::vector<double> pred;
  if (rc.kind == RegressorKind::ridge) {
    pred = fit_ridge(ds.train, plan, rc.lambda).predict(ds.val);
  } else {
    pred = fit_mlp(ds.train, ds.val, plan, rc.mlp).predict(ds.val);
  }
  return score(pred, ds.val.y);
}

inline double delta_ratio(const RegressionMetrics& masked, const RegressionMetrics& nothing) {
  if (masked.q_bar == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (masked.eps_rmse - nothing.eps_rmse) / masked.q_bar;
}

struct MaskResult {
  std::string mask;
  RegressionMetrics metrics;
};

// Runs each mask (plus `nothing` as the reference, if absent) and fills the
// delta-ratio column. Rows keep the requested order.
inline std::vector<MaskResult> mask_suite(const Dataset& ds, const std::vector<FeatureMask>& masks,
                                          const RegressorConfig& rc = {}, int jobs = 1) {
  std::vector<FeatureMask> run = masks;
  const bool has_nothing =
      std::any_of(masks.begin(), masks.end(), [](const FeatureMask& m) { return m.id == MaskId::nothing; });
  if (!has_nothing) run.push_back(mask_of(MaskId::nothing));

  std::vector<RegressionMetrics> out(run.size());
  parallel_for(run.size(), jobs, [&](std::size_t i) { out[i] = masked_regression(ds, run[i], rc); });

  RegressionMetrics nothing;
  for (std::size_t i = 0; i < run.size(); ++i)
    if (run[i].id == MaskId::nothing) nothing = out[i];
  std::vector<MaskResult> rows;
  for (std::size_t i = 0; i < masks.size(); ++i) {
    out[i].delta_ratio = delta_ratio(out[i], nothing);
    rows.push_back({std::string(masks[i].name), out[i]});
  }
  return rows;
}

inline std::string format_metrics_table(const std::vector<MaskResult>& rows) {
  auto num = [](double v) {
    if (!std::isfinite(v)) return std::string("n/a");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return std::string(buf);
  };
  const std::vector<std::string> head = {"mask", "Q_bar", "eps_rmse", "eps_rmse/Q_bar", "eps_abs",
                                         "(eps_rmse^mask-eps_rmse^nothing)/Q_bar"};
  std::vector<std::vector<std::string>> cells = {head};
  for (const auto& r : rows)
    cells.push_back({r.mask, num(r.metrics.q_bar), num(r.metrics.eps_rmse), num(r.metrics.ratio),
                     num(r.metrics.eps_abs), num(r.metrics.delta_ratio)});
  std::vector<std::size_t> width(head.size(), 0);
  for (const auto& row : cells)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  std::string out;
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += "  ";
      const std::string pad(width[c] - row[c].size(), ' ');
      out += c == 0 ? row[c] + pad : pad + row[c];
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += '\n';
  }
  return out;
}

inline nlohmann::json metrics_json(const std::vector<MaskResult>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    auto j = r.metrics.to_json();
    j["mask"] = r.mask;
    out.push_back(std::move(j));
  }
  return out;
}

}  // namespace smacsim
