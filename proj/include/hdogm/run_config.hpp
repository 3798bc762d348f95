#pragma once
// Run configuration and its plain-text `key = value` form.
//
//   # comment
//   env = grid
//   mapper = bhm
//   eval_seeds = 1-25
//
// Unknown keys, repeated keys and malformed values raise ConfigError.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hdogm/agents.hpp"
#include "hdogm/bhm.hpp"
#include "hdogm/car_world.hpp"
#include "hdogm/detail/format.hpp"
#include "hdogm/errors.hpp"
#include "hdogm/grid_world.hpp"
#include "hdogm/mapper.hpp"

namespace hdogm {

struct RunConfig {
  std::string env = "grid";            // grid | car
  std::string mapper = "vsa";          // vsa | bhm | none
  std::string agent = "auto";          // auto | frontier | wall_follow | noop
  /// What the frontier agent reads: the simulator's native grid or the
  /// mapper's scaled observation.
  std::string agent_observation = "native";  // native | mapper

  // VSA.
  std::size_t dim = 4096;
  double l = 3.0;
  std::size_t tiles = 4;
  // BHM.
  double bandwidth = 6.0;
  double spacing = 1.0;
  double prior_variance = 1e4;
  std::string bhm_kernel = "multiplier";  // multiplier | length_scale
  std::size_t vb_iterations = 1;

  std::size_t M = 1;
  /// Query grid cell size, meters.
  double resolution = 1.0;
  /// Steps between map queries; the final step is always queried.
  std::size_t query_interval = 1;

  std::uint64_t seed = 1;
  std::size_t episodes = 1;
  std::vector<std::uint64_t> train_seeds;
  std::vector<std::uint64_t> eval_seeds;
  std::vector<std::string> suite_mappers;
  std::string out = "out";

  // Grid world.
  std::size_t rows = 20;
  std::size_t cols = 20;
  int level = 0;  // 1, 5 or 10 override rows/cols
  double density = 0.2;
  std::size_t ray_count = 32;
  double max_range = 0.0;
  std::size_t step_cap = 0;  // 0: environment default

  // Racetrack.
  std::string track = "oval";
  std::string track_pgm;
  std::string track_sidecar;
  std::size_t beams = 1080;
  double fov = 273.5;
  double lidar_range = 10.0;
  double lidar_noise = 0.05;
  double theta_denominator = 360.0;
  bool abs_steering_penalty = false;
  double cruise = 0.5;
  double wall_kp = 1.0;
  double wall_target = 10.0;
  double wall_side_angle = 1.0;

  std::size_t latency_repeats = 10;

  /// Resolves `agent = auto` against the environment.
  std::string resolved_agent() const {
    if (agent != "auto") return agent;
    return env == "car" ? "wall_follow" : "frontier";
  }

  std::vector<std::string> mappers_for_suite() const {
    return suite_mappers.empty() ? std::vector<std::string>{mapper} : suite_mappers;
  }

  void validate() const;

  VsaParams vsa_params() const { return {dim, l, tiles}; }
  BhmOptions bhm_options() const {
    BhmOptions o;
    o.hinge_spacing = spacing;
    o.bandwidth = bandwidth;
    o.prior_variance = prior_variance;
    o.kernel = bhm_kernel == "length_scale" ? BhmKernel::LengthScale : BhmKernel::Multiplier;
    o.vb_iterations = vb_iterations;
    return o;
  }

  GridConfig grid_config(std::uint64_t layout_seed) const {
    GridConfig g = level != 0 ? GridConfig::for_level(level, layout_seed) : GridConfig{};
    if (level == 0) {
      g.rows = rows;
      g.cols = cols;
    }
    g.seed = layout_seed;
    g.obstacle_density = density;
    g.ray_count = ray_count;
    g.max_range = max_range;
    g.step_cap = step_cap;
    return g;
  }

  CarConfig car_config(std::uint64_t noise_seed) const {
    CarConfig c;
    c.lidar.beams = beams;
    c.lidar.fov_degrees = fov;
    c.lidar.max_range = lidar_range;
    c.lidar.noise = lidar_noise;
    c.lidar.theta_denominator = theta_denominator;
    c.rewards.abs_steering_penalty = abs_steering_penalty;
    if (step_cap > 0) c.step_cap = step_cap;
    c.seed = noise_seed;
    return c;
  }

  Track load_track() const {
    if (!track_pgm.empty()) return load_track_pgm(track_pgm, track_sidecar);
    return builtin_track(track);
  }

  WallFollowParams wall_follow_params() const {
    WallFollowParams p;
    p.kp = wall_kp;
    p.target = wall_target;
    p.cruise = cruise;
    p.side_angle = wall_side_angle;
    return p;
  }

  ScanOptions scan_options() const {
    ScanOptions o;
    o.interpolation_points = M;
    o.theta_denominator = env == "car" ? theta_denominator : 360.0;
    return o;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  return out;
}

inline double parse_f64(const std::string& key, const std::string& v) {
  std::istringstream is(v);
  double out = 0;
  char extra = 0;
  if (!(is >> out) || (is >> extra) || !std::isfinite(out)) throw ConfigError(key + ": expected a finite number, got '" + v + "'");
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

/// Comma-separated seeds and inclusive ranges, e.g. `1-25,40`; may be empty.
inline std::vector<std::uint64_t> parse_seed_list(const std::string& key, const std::string& v) {
  std::vector<std::uint64_t> out;
  std::istringstream is(v);
  std::string item;
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError(key + ": empty item in seed list '" + v + "'");
    const auto dash = item.find('-');
    if (dash == std::string::npos) {
      out.push_back(parse_u64(key, item));
      continue;
    }
    const auto lo = parse_u64(key, trim(item.substr(0, dash)));
    const auto hi = parse_u64(key, trim(item.substr(dash + 1)));
    if (hi < lo || hi - lo > 100000) throw ConfigError(key + ": bad seed range '" + item + "'");
    for (auto s = lo; s <= hi; ++s) out.push_back(s);
  }
  return out;
}

inline std::vector<std::string> parse_word_list(const std::string& v) {
  std::vector<std::string> out;
  std::istringstream is(v);
  std::string item;
  while (std::getline(is, item, ','))
    if (auto t = trim(item); !t.empty()) out.push_back(t);
  return out;
}

inline std::string join_seeds(const std::vector<std::uint64_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

inline std::string join_words(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s;
}

struct ConfigField {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

inline const std::map<std::string, ConfigField>& config_fields() {
  using C = RunConfig;
  const auto str = [](std::string C::*m) {
    return ConfigField{[m](C& c, const std::string& v) { c.*m = v; }, [m](const C& c) { return c.*m; }};
  };
  const auto size = [](std::size_t C::*m) {
    return ConfigField{[m](C& c, const std::string& v) { c.*m = static_cast<std::size_t>(parse_u64("", v)); },
                       [m](const C& c) { return std::to_string(c.*m); }};
  };
  const auto real = [](double C::*m) {
    return ConfigField{[m](C& c, const std::string& v) { c.*m = parse_f64("", v); },
                       [m](const C& c) { return format_exact(c.*m); }};
  };
  const auto seeds = [](std::vector<std::uint64_t> C::*m) {
    return ConfigField{[m](C& c, const std::string& v) { c.*m = parse_seed_list("", v); },
                       [m](const C& c) { return join_seeds(c.*m); }};
  };
  static const std::map<std::string, ConfigField> fields = {
      {"env", str(&C::env)},
      {"mapper", str(&C::mapper)},
      {"agent", str(&C::agent)},
      {"agent_observation", str(&C::agent_observation)},
      {"dim", size(&C::dim)},
      {"l", real(&C::l)},
      {"tiles", size(&C::tiles)},
      {"bandwidth", real(&C::bandwidth)},
      {"spacing", real(&C::spacing)},
      {"prior_variance", real(&C::prior_variance)},
      {"bhm_kernel", str(&C::bhm_kernel)},
      {"vb_iterations", size(&C::vb_iterations)},
      {"M", size(&C::M)},
      {"resolution", real(&C::resolution)},
      {"query_interval", size(&C::query_interval)},
      {"seed", {[](C& c, const std::string& v) { c.seed = parse_u64("", v); },
                [](const C& c) { return std::to_string(c.seed); }}},
      {"episodes", size(&C::episodes)},
      {"train_seeds", seeds(&C::train_seeds)},
      {"eval_seeds", seeds(&C::eval_seeds)},
      {"suite_mappers", {[](C& c, const std::string& v) { c.suite_mappers = parse_word_list(v); },
                         [](const C& c) { return join_words(c.suite_mappers); }}},
      {"out", str(&C::out)},
      {"rows", size(&C::rows)},
      {"cols", size(&C::cols)},
      {"level", {[](C& c, const std::string& v) { c.level = static_cast<int>(parse_u64("", v)); },
                 [](const C& c) { return std::to_string(c.level); }}},
      {"density", real(&C::density)},
      {"ray_count", size(&C::ray_count)},
      {"max_range", real(&C::max_range)},
      {"step_cap", size(&C::step_cap)},
      {"track", str(&C::track)},
      {"track_pgm", str(&C::track_pgm)},
      {"track_sidecar", str(&C::track_sidecar)},
      {"beams", size(&C::beams)},
      {"fov", real(&C::fov)},
      {"lidar_range", real(&C::lidar_range)},
      {"lidar_noise", real(&C::lidar_noise)},
      {"theta_denominator", real(&C::theta_denominator)},
      {"abs_steering_penalty", {[](C& c, const std::string& v) { c.abs_steering_penalty = parse_bool("", v); },
                                [](const C& c) { return std::string(c.abs_steering_penalty ? "true" : "false"); }}},
      {"cruise", real(&C::cruise)},
      {"wall_kp", real(&C::wall_kp)},
      {"wall_target", real(&C::wall_target)},
      {"wall_side_angle", real(&C::wall_side_angle)},
      {"latency_repeats", size(&C::latency_repeats)},
  };
  return fields;
}

}  // namespace detail

inline void set_config_value(RunConfig& c, const std::string& key, const std::string& value) {
  const auto& fields = detail::config_fields();
  const auto it = fields.find(key);
  if (it == fields.end()) throw ConfigError("unknown config key '" + key + "'");
  try {
    it->second.set(c, value);
  } catch (const ConfigError& e) {
    throw ConfigError(key + e.what());
  }
}

inline RunConfig parse_config(std::istream& is, RunConfig c = {}) {
  std::string line;
  std::size_t lineno = 0;
  std::map<std::string, std::size_t> seen;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (auto [it, fresh] = seen.emplace(key, lineno); !fresh)
      throw ConfigError("line " + std::to_string(lineno) + ": '" + key + "' already set on line " +
                        std::to_string(it->second));
    try {
      set_config_value(c, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  c.validate();
  return c;
}

/// Keys in the file override `base`.
inline RunConfig load_config(const std::string& path, const RunConfig& base = {}) {
  std::ifstream is(path);
  if (!is) throw ConfigError(path + ": cannot open config");
  try {
    return parse_config(is, base);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

/// Every key with its current value, in key order; parses back to `c`.
inline void write_config(std::ostream& os, const RunConfig& c) {
  for (const auto& [key, field] : detail::config_fields()) os << key << " = " << field.get(c) << '\n';
}

inline void RunConfig::validate() const {
  const auto fail = [](const std::string& m) { throw ConfigError(m); };
  const auto one_of = [&](const std::string& key, const std::string& v, std::initializer_list<const char*> allowed) {
    for (const char* a : allowed)
      if (v == a) return;
    std::string list;
    for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
    fail(key + ": '" + v + "' is not one of " + list);
  };
  one_of("env", env, {"grid", "car"});
  one_of("mapper", mapper, {"vsa", "bhm", "none"});
  one_of("agent", agent, {"auto", "frontier", "wall_follow", "noop"});
  one_of("agent_observation", agent_observation, {"native", "mapper"});
  one_of("bhm_kernel", bhm_kernel, {"multiplier", "length_scale"});
  for (const auto& m : suite_mappers) one_of("suite_mappers", m, {"vsa", "bhm", "none"});

  const auto a = resolved_agent();
  if (a == "frontier" && env != "grid") fail("agent: frontier runs only in the grid world");
  if (a == "wall_follow" && env != "car") fail("agent: wall_follow runs only on the racetrack");
  if (agent_observation == "mapper" && mapper == "none") fail("agent_observation: mapper needs a mapper");

  std::vector<std::string> used = mappers_for_suite();
  used.push_back(mapper);
  for (const auto& m : used) {
    if (m == "vsa") {
      if (dim < 2) fail("dim must be >= 2");
      if (!(l > 0)) fail("l must be > 0");
      if (tiles < 1) fail("tiles must be >= 1");
    } else if (m == "bhm") {
      if (!(bandwidth > 0)) fail("bandwidth must be > 0");
      if (!(spacing > 0)) fail("spacing must be > 0");
      if (!(prior_variance > 0)) fail("prior_variance must be > 0");
      if (vb_iterations < 1) fail("vb_iterations must be >= 1");
    }
  }
  if (!(resolution > 0)) fail("resolution must be > 0");
  if (query_interval < 1) fail("query_interval must be >= 1");
  if (episodes < 1) fail("episodes must be >= 1");
  if (out.empty()) fail("out must not be empty");
  if (latency_repeats < 5) fail("latency_repeats must be >= 5");

  if (env == "grid") {
    if (level != 0 && level != 1 && level != 5 && level != 10) fail("level must be 0, 1, 5 or 10");
    if (level == 0 && (rows < 3 || cols < 3)) fail("rows and cols must be >= 3");
    if (density < 0 || density > 0.4) fail("density must be in [0, 0.4]");
    if (ray_count < 1) fail("ray_count must be >= 1");
    if (max_range < 0) fail("max_range must be >= 0");
  } else {
    if (track_pgm.empty() != track_sidecar.empty()) fail("track_pgm and track_sidecar go together");
    if (track_pgm.empty()) one_of("track", track, {"oval", "lcorner", "chicane"});
    if (beams < 1) fail("beams must be >= 1");
    if (!(fov > 0 && fov <= 360)) fail("fov must be in (0, 360]");
    if (!(lidar_range > 0)) fail("lidar_range must be > 0");
    if (lidar_noise < 0 || lidar_noise >= 1) fail("lidar_noise must be in [0, 1)");
    if (!(theta_denominator > 0)) fail("theta_denominator must be > 0");
    if (cruise < -1 || cruise > 1) fail("cruise must be in [-1, 1]");
  }

  for (auto s : train_seeds)
    for (auto e : eval_seeds)
      if (s == e) fail("train_seeds and eval_seeds overlap at " + std::to_string(s));
}

inline std::unique_ptr<Mapper> make_mapper(const std::string& kind, const RunConfig& c, const MapExtent& extent,
                                           std::uint64_t seed) {
  if (kind == "vsa") return std::make_unique<VsaMapper>(extent, c.vsa_params(), seed);
  if (kind == "bhm") return std::make_unique<BhmMapper>(extent, c.bhm_options());
  if (kind == "none") return nullptr;
  throw ConfigError("unknown mapper '" + kind + "'");
}

}  // namespace hdogm
