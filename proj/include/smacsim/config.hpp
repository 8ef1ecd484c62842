#pragma once

// Experiment config file (JSON):
//
//   {
//     "version": 1,
//     "stat_table": { "version": "...", "units": { "<unit>": { "<field>": ... } } },
//     "stat_table_file": "data/units_v1.json",      // alternative to an inline table
//     "opponent": "pursuit" | "idle",
//     "reward": { "kill_bonus": 10, "win_bonus": 200, "cap": 20, "damage_taken_weight": 0 },
//     "obs": { "last_action": false },
//     "scenarios": [ { "name": ..., "base": "<registry name>", ... } ]
//   }
//
// Every key is optional. Scenarios defined here shadow registry entries of
// the same name. Command-line flags are applied on top by the CLI.

#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "smacsim/env.hpp"

namespace smacsim {

struct Config {
  EnvConfig env;
  std::vector<ScenarioSpec> scenarios;

  const ScenarioSpec& scenario(const std::string& name) const {
    for (const auto& s : scenarios)
      if (s.name == name) return s;
    return find_scenario(name);
  }
};

namespace detail {

inline nlohmann::json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON");
  }
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

inline StatTable load_stat_table(const std::filesystem::path& p) {
  const auto j = detail::parse_json_text(detail::read_file(p), p.string());
  try {
    return StatTable::from_json(j);
  } catch (const ConfigError& e) {
    throw ConfigError(p.string() + ": " + e.what());
  }
}

// `base_dir` resolves a relative stat_table_file.
inline Config config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {}) {
  using detail::read_json;
  if (!j.is_object()) throw ConfigError("config: expected an object at top level");
  Config c;
  for (const auto& [key, v] : j.items()) {
    if (key == "version") {
      if (read_json<int>(v, "version") != 1) throw ConfigError("field version: only version 1 is supported");
    } else if (key == "stat_table") {
      c.env.stats = std::make_shared<const StatTable>(StatTable::from_json(v));
    } else if (key == "stat_table_file") {
      std::filesystem::path p = read_json<std::string>(v, "stat_table_file");
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      c.env.stats = std::make_shared<const StatTable>(load_stat_table(p));
    } else if (key == "opponent") {
      c.env.opponent = make_opponent(read_json<std::string>(v, "opponent"));
    } else if (key == "reward") {
      if (!v.is_object()) throw ConfigError("field reward: expected an object");
      for (const auto& [rk, rv] : v.items()) {
        const std::string p = "reward." + rk;
        if (rk == "kill_bonus") c.env.reward.kill_bonus = read_json<double>(rv, p);
        else if (rk == "win_bonus") c.env.reward.win_bonus = read_json<double>(rv, p);
        else if (rk == "cap") c.env.reward.cap = read_json<double>(rv, p);
        else if (rk == "damage_taken_weight") c.env.reward.damage_taken_weight = read_json<double>(rv, p);
        else throw ConfigError("unknown field " + p);
      }
    } else if (key == "obs") {
      if (!v.is_object()) throw ConfigError("field obs: expected an object");
      for (const auto& [ok, ov] : v.items()) {
        if (ok == "last_action") c.env.obs.last_action = read_json<bool>(ov, "obs.last_action");
        else throw ConfigError("unknown field obs." + ok);
      }
    } else if (key == "scenarios") {
      if (!v.is_array()) throw ConfigError("field scenarios: expected an array");
      for (std::size_t i = 0; i < v.size(); ++i)
        c.scenarios.push_back(scenario_from_json(v[i], "scenarios[" + std::to_string(i) + "]"));
    } else {
      throw ConfigError("unknown field " + key);
    }
  }
  return c;
}

inline Config load_config(const std::filesystem::path& p) {
  const auto j = detail::parse_json_text(detail::read_file(p), p.string());
  try {
    return config_from_json(j, p.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(p.string() + ": " + e.what());
  }
}

}  // namespace smacsim
