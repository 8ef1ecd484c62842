#pragma once

// Unit catalogue: three unit types per race, a versioned stat table with
// desk-scale values, and its JSON form.
//
// The values are analogs, not StarCraft II numbers. They keep the relations
// the scenarios depend on: melee range sits exactly on the attack-range floor
// of 2, ranged units outrange melee ones, sight always exceeds attack range,
// the Terran special unit heals but never attacks, and the Zerg special unit
// deals splash damage by detonating itself on contact.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

#include "smacsim/errors.hpp"
#include "smacsim/json_util.hpp"

namespace smacsim {

enum class Race : std::uint8_t { protoss, terran, zerg };

enum class UnitType : std::uint8_t {
  stalker,
  zealot,
  colossus,
  marine,
  marauder,
  medivac,
  zergling,
  hydralisk,
  baneling,
};

inline constexpr std::size_t kUnitTypeCount = 9;
inline constexpr std::size_t kTypesPerRace = 3;
inline constexpr double kMinAttackRange = 2.0;

inline constexpr std::array<std::string_view, kUnitTypeCount> kUnitTypeNames = {
    "stalker", "zealot", "colossus", "marine", "marauder", "medivac", "zergling", "hydralisk", "baneling"};

inline constexpr std::array<std::string_view, 3> kRaceNames = {"protoss", "terran", "zerg"};

constexpr std::string_view to_string(UnitType t) { return kUnitTypeNames[static_cast<std::size_t>(t)]; }
constexpr std::string_view to_string(Race r) { return kRaceNames[static_cast<std::size_t>(r)]; }

inline UnitType parse_unit_type(std::string_view name) {
  for (std::size_t i = 0; i < kUnitTypeCount; ++i)
    if (kUnitTypeNames[i] == name) return static_cast<UnitType>(i);
  throw ConfigError("unknown unit type '" + std::string(name) + "'");
}

inline Race parse_race(std::string_view name) {
  for (std::size_t i = 0; i < kRaceNames.size(); ++i)
    if (kRaceNames[i] == name) return static_cast<Race>(i);
  throw ConfigError("unknown race '" + std::string(name) + "'");
}

constexpr Race race_of(UnitType t) { return static_cast<Race>(static_cast<std::size_t>(t) / kTypesPerRace); }

// Fixed per-race order: the two regular units, then the special unit.
constexpr std::array<UnitType, kTypesPerRace> race_units(Race r) {
  switch (r) {
    case Race::protoss: return {UnitType::stalker, UnitType::zealot, UnitType::colossus};
    case Race::terran: return {UnitType::marine, UnitType::marauder, UnitType::medivac};
    case Race::zerg: return {UnitType::zergling, UnitType::hydralisk, UnitType::baneling};
  }
  return {};
}

// Position of a type inside its race's order; used for the type one-hot.
constexpr std::size_t race_slot(UnitType t) { return static_cast<std::size_t>(t) % kTypesPerRace; }

struct UnitTypeSpec {
  UnitType id = UnitType::stalker;
  double max_health = 0.0;
  double max_shield = 0.0;
  double attack_damage = 0.0;
  double attack_range = 0.0;  // heal range for the healer
  double sight_range = 0.0;
  double move_speed = 0.0;
  int attack_cooldown = 1;
  bool is_healer = false;
  bool is_suicide_splash = false;
  double splash_radius = 0.0;
  double heal_per_step = 0.0;
};

class StatTable {
 public:
  std::string version = "units-v1";
  // Shields regenerate once a unit has gone this many steps without damage.
  int shield_regen_delay = 5;
  double shield_regen_per_step = 2.0;

  const UnitTypeSpec& operator[](UnitType t) const { return specs_[static_cast<std::size_t>(t)]; }
  UnitTypeSpec& operator[](UnitType t) { return specs_[static_cast<std::size_t>(t)]; }

  static StatTable defaults() {
    StatTable t;
    //                 id                   hp     sh    dmg  range sight speed cd healer suicide splash heal
    t.set({UnitType::stalker,   80.0,  80.0, 13.0, 6.0, 10.0, 1.0,  2, false, false, 0.0, 0.0});
    t.set({UnitType::zealot,    100.0, 50.0, 16.0, 2.0, 9.0,  1.0,  2, false, false, 0.0, 0.0});
    t.set({UnitType::colossus,  200.0, 150.0, 20.0, 7.0, 10.0, 0.75, 2, false, false, 0.0, 0.0});
    t.set({UnitType::marine,    45.0,  0.0,  6.0,  5.0, 9.0,  0.75, 1, false, false, 0.0, 0.0});
    t.set({UnitType::marauder,  125.0, 0.0,  10.0, 6.0, 10.0, 0.75, 2, false, false, 0.0, 0.0});
    t.set({UnitType::medivac,   150.0, 0.0,  0.0,  4.0, 11.0, 1.0,  1, true,  false, 0.0, 8.0});
    t.set({UnitType::zergling,  35.0,  0.0,  5.0,  2.0, 8.0,  1.0,  1, false, false, 0.0, 0.0});
    t.set({UnitType::hydralisk, 90.0,  0.0,  12.0, 5.0, 9.0,  0.75, 2, false, false, 0.0, 0.0});
    t.set({UnitType::baneling,  30.0,  0.0,  16.0, 2.0, 8.0,  1.0,  1, false, true,  2.2, 0.0});
    t.validate();
    return t;
  }

  void set(const UnitTypeSpec& s) { specs_[static_cast<std::size_t>(s.id)] = s; }

  // Throws ConfigError naming the offending unit type.
  void validate() const {
    int healers = 0;
    int suiciders = 0;
    for (std::size_t i = 0; i < kUnitTypeCount; ++i) {
      const auto& s = specs_[i];
      const std::string name(kUnitTypeNames[i]);
      if (static_cast<std::size_t>(s.id) != i) throw ConfigError("stat table entry '" + name + "' has mismatched id");
      if (s.attack_range < kMinAttackRange)
        throw ConfigError("unit '" + name + "': attack_range " + std::to_string(s.attack_range) +
                          " is below the minimum of 2");
      if (!(s.sight_range > s.attack_range))
        throw ConfigError("unit '" + name + "': sight_range must exceed attack_range");
      if (!(s.max_health > 0.0)) throw ConfigError("unit '" + name + "': max_health must be positive");
      if (s.max_shield < 0.0 || s.attack_damage < 0.0 || s.heal_per_step < 0.0 || s.splash_radius < 0.0)
        throw ConfigError("unit '" + name + "': negative stat");
      if (!(s.move_speed > 0.0)) throw ConfigError("unit '" + name + "': move_speed must be positive");
      if (s.attack_cooldown < 1) throw ConfigError("unit '" + name + "': attack_cooldown must be >= 1");
      if (s.is_healer && s.is_suicide_splash) throw ConfigError("unit '" + name + "': healer cannot be suicide unit");
      if (s.is_healer) {
        ++healers;
        if (race_of(s.id) != Race::terran) throw ConfigError("unit '" + name + "': only the Terran special unit heals");
        if (s.attack_damage != 0.0) throw ConfigError("unit '" + name + "': healer cannot attack");
        if (!(s.heal_per_step > 0.0)) throw ConfigError("unit '" + name + "': healer needs heal_per_step > 0");
      }
      if (s.is_suicide_splash) {
        ++suiciders;
        if (race_of(s.id) != Race::zerg) throw ConfigError("unit '" + name + "': only the Zerg special unit detonates");
        if (!(s.splash_radius > 0.0)) throw ConfigError("unit '" + name + "': suicide unit needs splash_radius > 0");
      }
      if (!s.is_healer && !(s.attack_damage > 0.0))
        throw ConfigError("unit '" + name + "': non-healer needs attack_damage > 0");
    }
    if (healers != 1) throw ConfigError("stat table must define exactly one healer type");
    if (suiciders != 1) throw ConfigError("stat table must define exactly one suicide-splash type");
    if (shield_regen_delay < 0 || shield_regen_per_step < 0.0) throw ConfigError("negative shield regeneration");
  }

  nlohmann::json to_json() const {
    nlohmann::json units = nlohmann::json::object();
    for (const auto& s : specs_) {
      units[std::string(to_string(s.id))] = {
          {"max_health", s.max_health},       {"max_shield", s.max_shield},
          {"attack_damage", s.attack_damage}, {"attack_range", s.attack_range},
          {"sight_range", s.sight_range},     {"move_speed", s.move_speed},
          {"attack_cooldown", s.attack_cooldown}, {"is_healer", s.is_healer},
          {"is_suicide_splash", s.is_suicide_splash}, {"splash_radius", s.splash_radius},
          {"heal_per_step", s.heal_per_step},
      };
    }
    return {{"version", version},
            {"shield_regen_delay", shield_regen_delay},
            {"shield_regen_per_step", shield_regen_per_step},
            {"units", units}};
  }

  // Unknown keys are rejected; missing unit fields fall back to the defaults so
  // a config can override a single stat. The result is validated.
  static StatTable from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("stat_table: expected an object");
    StatTable t = defaults();
    for (const auto& [key, value] : j.items()) {
      if (key == "version") {
        t.version = detail::read_json<std::string>(value, "stat_table.version");
      } else if (key == "shield_regen_delay") {
        t.shield_regen_delay = detail::read_json<int>(value, "stat_table.shield_regen_delay");
      } else if (key == "shield_regen_per_step") {
        t.shield_regen_per_step = detail::read_json<double>(value, "stat_table.shield_regen_per_step");
      } else if (key == "units") {
        if (!value.is_object()) throw ConfigError("stat_table.units: expected an object");
        for (const auto& [uname, fields] : value.items()) {
          const UnitType id = parse_unit_type(uname);
          UnitTypeSpec& s = t[id];
          const std::string base = "stat_table.units." + uname + ".";
          if (!fields.is_object()) throw ConfigError("stat_table.units." + uname + ": expected an object");
          for (const auto& [f, v] : fields.items()) {
            const std::string path = base + f;
            if (f == "max_health") s.max_health = detail::read_json<double>(v, path);
            else if (f == "max_shield") s.max_shield = detail::read_json<double>(v, path);
            else if (f == "attack_damage") s.attack_damage = detail::read_json<double>(v, path);
            else if (f == "attack_range") s.attack_range = detail::read_json<double>(v, path);
            else if (f == "sight_range") s.sight_range = detail::read_json<double>(v, path);
            else if (f == "move_speed") s.move_speed = detail::read_json<double>(v, path);
            else if (f == "attack_cooldown") s.attack_cooldown = detail::read_json<int>(v, path);
            else if (f == "is_healer") s.is_healer = detail::read_json<bool>(v, path);
            else if (f == "is_suicide_splash") s.is_suicide_splash = detail::read_json<bool>(v, path);
            else if (f == "splash_radius") s.splash_radius = detail::read_json<double>(v, path);
            else if (f == "heal_per_step") s.heal_per_step = detail::read_json<double>(v, path);
            else throw ConfigError("unknown field " + path);
          }
        }
      } else {
        throw ConfigError("unknown field stat_table." + key);
      }
    }
    t.validate();
    return t;
  }

 private:
  std::array<UnitTypeSpec, kUnitTypeCount> specs_{};
};

}  // namespace smacsim
