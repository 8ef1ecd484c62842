// smacsim command-line tool. Exit codes: 0 success, 2 configuration error,
// 3 replay divergence, 1 anything else.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "smacsim/smacsim.hpp"

using namespace smacsim;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;

struct Common {
  std::uint64_t seed = 0;
  std::string scenario = "protoss_5_vs_5";
  std::string config;
  std::string epo_p;  // probability, or "off"
  bool no_avail_mask = false;
  int jobs = 1;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Base seed");
  cmd->add_option("--scenario", c.scenario, "Scenario name (registry or config)");
  cmd->add_option("--config", c.config, "JSON experiment config");
  cmd->add_option("--epo-p", c.epo_p, "EPO grant probability, or 'off'");
  cmd->add_flag("--no-avail-mask", c.no_avail_mask, "Disable the available-actions mask");
  cmd->add_option("--jobs", c.jobs, "Parallel workers")->check(CLI::PositiveNumber);
}

struct Setup {
  Config config;
  ScenarioSpec spec;
};

Setup resolve(const Common& c) {
  Setup s;
  if (!c.config.empty()) s.config = load_config(c.config);
  s.spec = s.config.scenario(c.scenario);
  if (!c.epo_p.empty()) {
    if (c.epo_p == "off") {
      s.config.env.epo_p = std::optional<double>();
    } else {
      double p = 0.0;
      try {
        std::size_t used = 0;
        p = std::stod(c.epo_p, &used);
        if (used != c.epo_p.size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ConfigError("--epo-p: expected a probability or 'off', got '" + c.epo_p + "'");
      }
      s.config.env.epo_p = std::optional<double>(p);
    }
  }
  if (c.no_avail_mask) s.config.env.avail_mask = false;
  return s;
}

std::unique_ptr<Policy> policy_from(const std::string& name, const std::string& table) {
  if (!table.empty()) {
    std::ifstream in(table);
    if (!in) throw ConfigError("cannot open " + table);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(table + ": malformed JSON (" + e.what() + ")");
    }
    return std::make_unique<OpenLoopPolicy>(OpenLoopPolicy::from_json(j));
  }
  return make_policy(name);
}

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::vector<EpisodeRecord> read_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  return read_jsonl(in);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent combat simulator with open-loop and feature-mask diagnostics"};
  app.require_subcommand(1);

  Common common;

  // list-scenarios
  bool list_json = false;
  auto* list = app.add_subcommand("list-scenarios", "Print the scenario registry");
  add_common(list, common);
  list->add_flag("--json", list_json, "Full specs as JSON");

  // sample
  auto* sample = app.add_subcommand("sample", "Sample one scenario instance");
  add_common(sample, common);

  // layout
  bool layout_state = false;
  auto* layout = app.add_subcommand("layout", "Print the observation or state index manifest");
  add_common(layout, common);
  layout->add_flag("--state", layout_state, "State layout instead of observation layout");

  // run / eval
  std::string policy_name = "focus_fire";
  std::string table_path;
  int episodes = 1;
  std::string record_path;
  bool record_obs = false;
  auto* run = app.add_subcommand("run", "Play episodes and print per-episode outcomes");
  add_common(run, common);
  run->add_option("--policy", policy_name, "random | stop | focus_fire | kite");
  run->add_option("--table", table_path, "Open-loop table (JSON); overrides --policy");
  run->add_option("--episodes", episodes, "Number of episodes")->check(CLI::PositiveNumber);
  run->add_option("--record", record_path, "Write episode records (JSONL)");
  run->add_flag("--record-obs", record_obs, "Include observations, state, masks and EPO verdicts in records");

  int eval_episodes = 20;
  auto* eval = app.add_subcommand("eval", "Win rate and mean return of a policy");
  add_common(eval, common);
  eval->add_option("--policy", policy_name, "random | stop | focus_fire | kite");
  eval->add_option("--table", table_path, "Open-loop table (JSON); overrides --policy");
  eval->add_option("--episodes", eval_episodes, "Number of episodes")->check(CLI::PositiveNumber);

  // fit-openloop
  std::string records_in;
  std::string out_path;
  bool winners_only = false;
  auto* fit = app.add_subcommand("fit-openloop", "Fit a (timestep, agent) action table from records");
  fit->add_option("--records", records_in, "Episode records (JSONL)")->required();
  fit->add_option("--out", out_path, "Output table (JSON)")->required();
  fit->add_flag("--winners-only", winners_only, "Use only won episodes");

  // export-dataset
  DatasetConfig dc;
  std::string source = "obs";
  std::string targets_path;
  auto* exp = app.add_subcommand("export-dataset", "Record episodes into a two-fold regression dataset");
  add_common(exp, common);
  exp->add_option("--policy", policy_name, "random | stop | focus_fire | kite");
  exp->add_option("--table", table_path, "Open-loop table (JSON); overrides --policy");
  exp->add_option("--train", dc.n_train, "Training episodes")->check(CLI::PositiveNumber);
  exp->add_option("--val", dc.n_val, "Validation episodes")->check(CLI::PositiveNumber);
  exp->add_option("--gamma", dc.gamma, "Discount for Monte-Carlo targets")->check(CLI::Range(0.0, 1.0));
  exp->add_option("--source", source, "obs | state")->check(CLI::IsMember({"obs", "state"}));
  exp->add_option("--targets", targets_path, "External targets: JSON array of per-episode arrays");
  exp->add_option("--out", out_path, "Output dataset (JSONL)")->required();

  // regress
  std::string dataset_path;
  std::vector<std::string> mask_names;
  std::string regressor = "ridge";
  RegressorConfig rc;
  std::string json_out;
  auto* reg = app.add_subcommand("regress", "Masked regression metrics on a dataset");
  add_common(reg, common);
  reg->add_option("--dataset", dataset_path, "Dataset (JSONL)")->required();
  reg->add_option("--mask", mask_names, "Mask name (repeatable; default: all 13)");
  reg->add_option("--regressor", regressor, "ridge | mlp")->check(CLI::IsMember({"ridge", "mlp"}));
  reg->add_option("--lambda", rc.lambda, "Ridge regularization")->check(CLI::NonNegativeNumber);
  reg->add_option("--json", json_out, "Also write metrics as JSON");

  // replay
  auto* rep = app.add_subcommand("replay", "Verify recorded episodes reproduce exactly");
  add_common(rep, common);
  rep->add_option("--records", records_in, "Episode records (JSONL)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*list) {
      const Config cfg = common.config.empty() ? Config{} : load_config(common.config);
      std::vector<ScenarioSpec> all = registry();
      for (const auto& s : cfg.scenarios) all.push_back(s);
      if (list_json) {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& s : all) j.push_back(to_json(s));
        std::cout << j.dump(2) << '\n';
      } else {
        for (const auto& s : all) {
          std::cout << s.name << "  race=" << to_string(s.race.race) << "  allies=" << s.n_allies
                    << "  enemies=" << s.n_enemies << "  limit=" << s.episode_limit
                    << "  epo_p=" << (s.epo_p ? fmt(*s.epo_p, 2) : "off")
                    << "  avail_mask=" << (s.avail_mask_enabled ? "on" : "off") << '\n';
        }
      }
      return 0;
    }

    if (*sample) {
      const Setup s = resolve(common);
      const Env env(s.spec, s.config.env);
      std::cout << to_json(sample_instance(env.spec(), common.seed)).dump(2) << '\n';
      return 0;
    }

    if (*layout) {
      const Setup s = resolve(common);
      const Env env(s.spec, s.config.env);
      std::cout << (layout_state ? env.state_layout() : env.obs_layout()).manifest().dump(2) << '\n';
      return 0;
    }

    if (*run || *eval) {
      const Setup s = resolve(common);
      const auto policy = policy_from(policy_name, table_path);
      const int n = *run ? episodes : eval_episodes;
      RecordOptions opt = record_obs ? RecordOptions::full() : RecordOptions{};
      const auto recs = collect(*policy, s.spec, n, common.seed, s.config.env, common.jobs, opt);
      if (*run) {
        for (std::size_t i = 0; i < recs.size(); ++i)
          std::cout << "episode " << i << " seed " << recs[i].seed << " won " << recs[i].won << " return "
                    << fmt(recs[i].total_return) << " length " << recs[i].length() << '\n';
        if (!record_path.empty()) {
          auto out = open_out(record_path);
          for (const auto& r : recs) write_jsonl(out, r);
        }
      }
      const EvalResult r = summarize(recs);
      std::cout << "scenario " << s.spec.name << " policy " << policy->name() << " episodes " << r.episodes
                << " wins " << r.wins << " win_rate " << fmt(r.win_rate, 4) << " mean_return "
                << fmt(r.mean_return) << '\n';
      return 0;
    }

    if (*fit) {
      auto recs = read_records(records_in);
      if (winners_only) std::erase_if(recs, [](const EpisodeRecord& r) { return !r.won; });
      if (recs.empty()) throw ConfigError("fit-openloop: no usable episodes in " + records_in);
      auto out = open_out(out_path);
      out << fit_openloop(recs).to_json().dump() << '\n';
      std::cout << "fitted from " << recs.size() << " episodes\n";
      return 0;
    }

    if (*exp) {
      const Setup s = resolve(common);
      const auto policy = policy_from(policy_name, table_path);
      dc.seed = common.seed;
      dc.source = source == "state" ? FeatureSource::state : FeatureSource::observation;
      std::vector<std::vector<double>> external;
      if (!targets_path.empty()) {
        std::ifstream in(targets_path);
        if (!in) throw ConfigError("cannot open " + targets_path);
        try {
          external = nlohmann::json::parse(in).get<std::vector<std::vector<double>>>();
        } catch (const nlohmann::json::exception& e) {
          throw ConfigError(targets_path + ": " + e.what());
        }
        dc.target = TargetKind::external;
      }
      const Dataset ds = export_regression_dataset(*policy, s.spec, dc, s.config.env, common.jobs,
                                                   targets_path.empty() ? nullptr : &external);
      auto out = open_out(out_path);
      write_dataset(out, ds);
      std::cout << "train rows " << ds.train.rows() << " val rows " << ds.val.rows() << " features "
                << ds.layout.size() << '\n';
      return 0;
    }

    if (*reg) {
      std::ifstream in(dataset_path);
      if (!in) throw ConfigError("cannot open " + dataset_path);
      const Dataset ds = read_dataset(in);
      std::vector<FeatureMask> masks;
      if (mask_names.empty()) {
        masks.assign(all_masks().begin(), all_masks().end());
      } else {
        for (const auto& m : mask_names) masks.push_back(mask_by_name(m));
      }
      rc.kind = regressor == "mlp" ? RegressorKind::mlp : RegressorKind::ridge;
      rc.mlp.seed = common.seed;
      const auto rows = mask_suite(ds, masks, rc, common.jobs);
      std::cout << format_metrics_table(rows);
      if (!json_out.empty()) open_out(json_out) << metrics_json(rows).dump(2) << '\n';
      return 0;
    }

    if (*rep) {
      std::shared_ptr<const StatTable> stats;
      if (!common.config.empty()) stats = load_config(common.config).env.stats;
      const auto recs = read_records(records_in);
      bool all_ok = true;
      for (std::size_t i = 0; i < recs.size(); ++i) {
        const ReplayReport r = replay(recs[i], stats);
        std::cout << "episode " << i << " seed " << recs[i].seed << ": "
                  << (r.ok ? std::string("reproduced") : "DIVERGED " + r.message) << '\n';
        all_ok = all_ok && r.ok;
      }
      return all_ok ? 0 : kExitDivergence;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
