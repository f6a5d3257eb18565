#pragma once
// Strict INI configuration: one section per module, unknown keys rejected.
//
//   [rng]        seed
//   [lattice]    profile = stationary | flat, mesh
//   [contour]    t_budget, max_cells
//   [samplers]   dt, bridge_correction, max_steps, adapt_height
//   [estimators] replicas, levels, bootstrap
//   [area_laws]  a_min, a_max, points
//   [run]        threads

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "tsrm/csv.hpp"
#include "tsrm/errors.hpp"
#include "tsrm/lattice_web.hpp"
#include "tsrm/samplers.hpp"

namespace tsrm {

struct Config {
  std::uint64_t seed = 1;
  ProfileKind profile = ProfileKind::stationary;
  double mesh = 1.0 / 1024;
  double t_budget = 1.0;
  std::int64_t max_cells = std::int64_t{1} << 31;
  SdeConfig sde;
  std::int64_t replicas = 100000;
  int levels = 6;
  int bootstrap = 1000;
  double a_min = 1e-2, a_max = 1e3;
  std::int64_t points = 200;
  unsigned threads = 1;

  friend bool operator==(const Config& a, const Config& b) {
    return a.seed == b.seed && a.profile == b.profile && a.mesh == b.mesh && a.t_budget == b.t_budget &&
           a.max_cells == b.max_cells && a.sde.dt == b.sde.dt && a.sde.bridge_correction == b.sde.bridge_correction &&
           a.sde.max_steps == b.sde.max_steps && a.sde.adapt_height == b.sde.adapt_height &&
           a.replicas == b.replicas && a.levels == b.levels && a.bootstrap == b.bootstrap && a.a_min == b.a_min &&
           a.a_max == b.a_max && a.points == b.points && a.threads == b.threads;
  }
};

namespace detail {

template <class T>
T parse_int_value(const std::string& name, const std::string& v) {
  T out{};
  auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw config_error(name + ": expected an integer, got '" + v + "'");
  return out;
}

inline double parse_real_value(const std::string& name, const std::string& v) {
  double out = 0;
  auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw config_error(name + ": expected a number, got '" + v + "'");
  return out;
}

inline bool parse_bool_value(const std::string& name, const std::string& v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw config_error(name + ": expected true or false, got '" + v + "'");
}

struct Field {
  std::string section, key;
  std::function<void(Config&, const std::string&)> set;
  std::function<std::string(const Config&)> get;
  std::function<bool(const Config&)> valid;
  std::string name() const { return section + "." + key; }
};

inline const std::vector<Field>& config_fields() {
  static const std::vector<Field> fields = [] {
    std::vector<Field> f;
    auto real = [&f](std::string sec, std::string key, double Config::*m, std::function<bool(double)> ok) {
      const std::string n = sec + "." + key;
      f.push_back({sec, key, [m, n](Config& c, const std::string& v) { c.*m = parse_real_value(n, v); },
                   [m](const Config& c) { return format_number(c.*m); }, [m, ok](const Config& c) { return ok(c.*m); }});
    };
    auto i64 = [&f](std::string sec, std::string key, std::int64_t Config::*m, std::int64_t lo) {
      const std::string n = sec + "." + key;
      f.push_back({sec, key, [m, n](Config& c, const std::string& v) { c.*m = parse_int_value<std::int64_t>(n, v); },
                   [m](const Config& c) { return std::to_string(c.*m); }, [m, lo](const Config& c) { return c.*m >= lo; }});
    };
    auto pos = [](double v) { return v > 0; };
    f.push_back({"rng", "seed",
                 [](Config& c, const std::string& v) { c.seed = parse_int_value<std::uint64_t>("rng.seed", v); },
                 [](const Config& c) { return std::to_string(c.seed); }, [](const Config&) { return true; }});
    f.push_back({"lattice", "profile",
                 [](Config& c, const std::string& v) {
                   if (v == "stationary") c.profile = ProfileKind::stationary;
                   else if (v == "flat") c.profile = ProfileKind::flat;
                   else throw config_error("lattice.profile: expected stationary or flat, got '" + v + "'");
                 },
                 [](const Config& c) { return std::string(c.profile == ProfileKind::flat ? "flat" : "stationary"); },
                 [](const Config&) { return true; }});
    real("lattice", "mesh", &Config::mesh, pos);
    real("contour", "t_budget", &Config::t_budget, pos);
    i64("contour", "max_cells", &Config::max_cells, 1);
    f.push_back({"samplers", "dt", [](Config& c, const std::string& v) { c.sde.dt = parse_real_value("samplers.dt", v); },
                 [](const Config& c) { return format_number(c.sde.dt); }, [](const Config& c) { return c.sde.dt > 0; }});
    f.push_back({"samplers", "bridge_correction",
                 [](Config& c, const std::string& v) { c.sde.bridge_correction = parse_bool_value("samplers.bridge_correction", v); },
                 [](const Config& c) { return std::string(c.sde.bridge_correction ? "true" : "false"); },
                 [](const Config&) { return true; }});
    f.push_back({"samplers", "max_steps",
                 [](Config& c, const std::string& v) { c.sde.max_steps = parse_int_value<std::int64_t>("samplers.max_steps", v); },
                 [](const Config& c) { return std::to_string(c.sde.max_steps); },
                 [](const Config& c) { return c.sde.max_steps > 0; }});
    f.push_back({"samplers", "adapt_height",
                 [](Config& c, const std::string& v) { c.sde.adapt_height = parse_real_value("samplers.adapt_height", v); },
                 [](const Config& c) { return format_number(c.sde.adapt_height); },
                 [](const Config& c) { return c.sde.adapt_height >= 0; }});
    i64("estimators", "replicas", &Config::replicas, 1);
    f.push_back({"estimators", "levels",
                 [](Config& c, const std::string& v) { c.levels = parse_int_value<int>("estimators.levels", v); },
                 [](const Config& c) { return std::to_string(c.levels); }, [](const Config& c) { return c.levels >= 1; }});
    f.push_back({"estimators", "bootstrap",
                 [](Config& c, const std::string& v) { c.bootstrap = parse_int_value<int>("estimators.bootstrap", v); },
                 [](const Config& c) { return std::to_string(c.bootstrap); },
                 [](const Config& c) { return c.bootstrap >= 10; }});
    real("area_laws", "a_min", &Config::a_min, pos);
    real("area_laws", "a_max", &Config::a_max, pos);
    i64("area_laws", "points", &Config::points, 2);
    f.push_back({"run", "threads",
                 [](Config& c, const std::string& v) { c.threads = parse_int_value<unsigned>("run.threads", v); },
                 [](const Config& c) { return std::to_string(c.threads); }, [](const Config& c) { return c.threads >= 1; }});
    return f;
  }();
  return fields;
}

}  // namespace detail

inline void validate_config(const Config& c) {
  for (const auto& f : detail::config_fields())
    if (!f.valid(c)) throw config_error(f.name() + ": invalid value " + f.get(c));
  if (!(c.a_max > c.a_min)) throw config_error("area_laws.a_max: must exceed area_laws.a_min");
}

inline Config parse_config(const std::string& text, const std::string& origin = "<string>") {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw config_error(origin + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  Config c;
  const auto& fields = detail::config_fields();
  for (const auto& [sec, sub] : tree) {
    if (sub.empty() && !sub.data().empty()) throw config_error(origin + ": key '" + sec + "' outside any section");
    for (const auto& [key, val] : sub) {
      auto it = std::find_if(fields.begin(), fields.end(), [&](const detail::Field& f) { return f.section == sec && f.key == key; });
      if (it == fields.end()) throw config_error(origin + ": unknown key " + sec + "." + key);
      it->set(c, val.data());
    }
  }
  validate_config(c);
  return c;
}

inline Config load_config(const std::string& path) { return parse_config(read_text_file(path), path); }

/// Canonical INI text; parse_config(config_to_ini(c)) == c.
inline std::string config_to_ini(const Config& c) {
  std::string out, cur;
  for (const auto& f : detail::config_fields()) {
    if (f.section != cur) {
      if (!cur.empty()) out += '\n';
      out += "[" + f.section + "]\n";
      cur = f.section;
    }
    out += f.key + " = " + f.get(c) + "\n";
  }
  return out;
}

inline std::map<std::string, std::map<std::string, std::string>> config_snapshot(const Config& c) {
  std::map<std::string, std::map<std::string, std::string>> m;
  for (const auto& f : detail::config_fields()) m[f.section][f.key] = f.get(c);
  return m;
}

}  // namespace tsrm
