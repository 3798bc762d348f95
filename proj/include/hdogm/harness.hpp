#pragma once
// Closed-loop episodes, generalization suites, replay evaluation and latency
// benchmarks.
//
// One step of an episode:
//   scan -> build_training_set -> mapper ingest -> query_grid
//        -> observation -> agent action -> environment step

#include <chrono>
#include <exception>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "hdogm/agents.hpp"
#include "hdogm/car_world.hpp"
#include "hdogm/detail/format.hpp"
#include "hdogm/detail/raycast.hpp"
#include "hdogm/grid_world.hpp"
#include "hdogm/io.hpp"
#include "hdogm/mapper.hpp"
#include "hdogm/metrics.hpp"
#include "hdogm/run_config.hpp"
#include "hdogm/scan_pipeline.hpp"

namespace hdogm {

struct EpisodeReport {
  std::string env;
  std::string mapper;
  std::string agent;
  std::uint64_t seed = 0;
  std::size_t steps = 0;
  /// Per-component sums over the episode; `total` is the sum of step totals.
  RewardBreakdown reward;
  std::optional<double> coverage;   // grid
  std::optional<bool> collision;    // car
  bool exploration_complete = false;
  std::optional<MapAccuracy> map;
  /// Ingest + query time per step.
  std::optional<LatencyStats> latency;
  std::optional<std::size_t> model_size_bytes;
  /// Final map on the evaluation grid; not serialized.
  std::optional<OccupancyGrid> scores;
};

inline nlohmann::ordered_json to_json(const RewardBreakdown& r) {
  return {{"total", r.total},           {"r_explore", r.r_explore},   {"r_move", r.r_move},
          {"r_bonus", r.r_bonus},       {"r_invalid", r.r_invalid},   {"r_velocity", r.r_velocity},
          {"r_steering", r.r_steering}, {"r_obstacle", r.r_obstacle}, {"r_collision", r.r_collision}};
}

/// Latency is hardware-dependent; leave it out for byte-stable output.
inline nlohmann::ordered_json to_json(const EpisodeReport& r, bool with_latency = true) {
  nlohmann::ordered_json j;
  j["env"] = r.env;
  j["mapper"] = r.mapper;
  j["agent"] = r.agent;
  j["seed"] = r.seed;
  j["steps"] = r.steps;
  j["total_reward"] = r.reward.total;
  j["reward"] = to_json(r.reward);
  j["coverage"] = r.coverage ? nlohmann::ordered_json(*r.coverage) : nullptr;
  j["collision"] = r.collision ? nlohmann::ordered_json(*r.collision) : nullptr;
  j["exploration_complete"] = r.exploration_complete;
  if (r.map) {
    j["map"] = {{"accuracy", r.map->accuracy},
                {"auc", r.map->auc ? nlohmann::ordered_json(*r.map->auc) : nullptr},
                {"cells", r.map->cells}};
  } else {
    j["map"] = nullptr;
  }
  if (with_latency)
    j["latency_ms"] = r.latency ? nlohmann::ordered_json{{"mean", r.latency->mean_ms},
                                                         {"std", r.latency->std_ms},
                                                         {"repeats", r.latency->repeats}}
                                : nlohmann::ordered_json(nullptr);
  j["model_size_bytes"] = r.model_size_bytes ? nlohmann::ordered_json(*r.model_size_bytes) : nullptr;
  return j;
}

/// What the agent saw at step t, for callers that attach their own learner
/// or logging.
struct StepView {
  std::size_t t = 0;
  const PolarScan& scan;
  const Pose2D& pose;
  double speed = 0.0;
  const LabeledPointSet& points;
  /// Scaled mapper observation; null without a mapper or between queries.
  const OccupancyGrid* observation = nullptr;
  const RewardBreakdown& reward;
};

struct EpisodeHooks {
  ScanLogWriter* scan_log = nullptr;
  std::function<void(const StepView&)> on_step;
};

/// Cells seen by replayed beams: every free cell a beam crosses and the
/// occupied cell that stops it.
class ObservedMask {
 public:
  ObservedMask(std::vector<std::uint8_t> occupancy, const detail::RayGrid& grid)
      : occ_(std::move(occupancy)), grid_(grid), seen_(grid.rows * grid.cols, false) {
    detail::require(occ_.size() == seen_.size(), "observed mask: occupancy size mismatch");
  }

  void mark(const Pose2D& pose, const PolarScan& scan, const ThetaVector& theta) {
    detail::require(scan.ranges.size() == theta.angles.size(), "observed mask: scan and angles differ");
    const auto occ = [this](std::size_t r, std::size_t c) { return occ_[r * grid_.cols + c] != 0; };
    const auto visit = [this](const Cell& c) { seen_[c.row * grid_.cols + c.col] = true; };
    const double ch = std::cos(pose.heading), sh = std::sin(pose.heading);
    const double cutoff = scan.max_range * (1.0 - 1e-6);
    for (std::size_t i = 0; i < scan.ranges.size(); ++i) {
      const double sx = std::sin(theta.angles[i]), sy = std::cos(theta.angles[i]);
      const double r = scan.ranges[i];
      // Slack lets a beam that ended on a wall face reach the wall cell.
      const double reach = r >= cutoff ? scan.max_range : r * (1.0 + 1e-9) + 1e-9;
      const auto hit =
          detail::cast_ray(grid_, {pose.x, pose.y}, ch * sx - sh * sy, sh * sx + ch * sy, reach, occ, visit);
      if (hit.hit && hit.cell) visit(*hit.cell);
    }
  }

  const std::vector<bool>& seen() const noexcept { return seen_; }

 private:
  std::vector<std::uint8_t> occ_;
  detail::RayGrid grid_;
  std::vector<bool> seen_;
};

namespace detail {

inline OccupancyGrid track_truth(const Track& t) {
  OccupancyGrid g(t.rows, t.cols, t.resolution, {0.0, 0.0});
  for (std::size_t i = 0; i < t.walls.size(); ++i) g.values()[i] = t.walls[i] ? 1.0 : 0.0;
  return g;
}

inline ObservedMask track_mask(const Track& t) { return ObservedMask(t.walls, {t.rows, t.cols, t.resolution, true}); }

/// Ingest, optional query, timing; shared by both environments.
class MapperStep {
 public:
  MapperStep(std::unique_ptr<Mapper> mapper, double resolution, std::size_t interval)
      : mapper_(std::move(mapper)), resolution_(resolution), interval_(interval) {}

  explicit operator bool() const noexcept { return static_cast<bool>(mapper_); }
  Mapper& mapper() { return *mapper_; }

  /// Returns the fresh query grid, or null when this step skips the query.
  const OccupancyGrid* update(std::size_t t, bool last, const LabeledPointSet& points) {
    if (!mapper_) return nullptr;
    const bool query = last || t % interval_ == 0;
    const auto t0 = std::chrono::steady_clock::now();
    mapper_->ingest(points);
    if (query) grid_ = mapper_->query_grid(resolution_);
    samples_.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
    return query ? &grid_ : nullptr;
  }

  void finish(EpisodeReport& r, const OccupancyGrid& truth, const std::vector<bool>& observed) const {
    if (!mapper_) return;
    auto eval = mapper_->query_grid(truth.resolution());
    detail::require(eval.rows() == truth.rows() && eval.cols() == truth.cols(),
                    "evaluation grid does not match the truth grid");
    r.map = evaluate_map_accuracy(eval, truth, observed, mapper_->threshold());
    r.latency = summarize_latency(samples_);
    r.model_size_bytes = mapper_->model_size_bytes();
    r.scores = std::move(eval);
  }

 private:
  std::unique_ptr<Mapper> mapper_;
  double resolution_;
  std::size_t interval_;
  OccupancyGrid grid_;
  std::vector<double> samples_;
};

template <class Body>
void with_step_index(std::size_t t, Body&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    std::throw_with_nested(StepError(t, e.what()));
  }
}

inline EpisodeReport run_grid_episode(const RunConfig& c, std::uint64_t seed, const EpisodeHooks& hooks) {
  const std::string agent = c.resolved_agent();
  if (c.agent_observation == "mapper")
    require(c.resolution == 1.0, "a mapper observation for the grid world needs resolution = 1");
  GridWorld world(c.grid_config(seed));
  const ScanOptions opts = c.scan_options();
  MapperStep mapper(make_mapper(c.mapper, c, world.extent(), seed), c.resolution, c.query_interval);

  EpisodeReport r;
  r.env = "grid";
  r.mapper = c.mapper;
  r.agent = agent;
  r.seed = seed;
  GridStep s = world.reset();
  r.reward = s.reward;
  OccupancyGrid observation;
  bool have_observation = false;
  for (std::size_t t = 0;; ++t) {
    bool stop = false;
    with_step_index(t, [&] {
      const Pose2D pose = world.pose();
      if (hooks.scan_log) hooks.scan_log->write(t, s.scan, pose);
      const LabeledPointSet points = build_training_set(s.scan, pose, opts);
      if (const OccupancyGrid* g = mapper.update(t, world.done(), points)) {
        observation = mapper.mapper().observation(*g, world.agent());
        have_observation = true;
      }
      if (hooks.on_step)
        hooks.on_step({t, s.scan, pose, 0.0, points, have_observation ? &observation : nullptr, s.reward});
      if (world.done()) {
        stop = true;
        return;
      }
      GridAction action = GridAction::Stay;
      if (agent == "frontier") {
        const auto cells = c.agent_observation == "native" ? classify_native(world.native_observation())
                                                           : classify_scaled(observation);
        const auto d = frontier_action(cells, world.rows(), world.cols(), world.agent());
        if (d.exploration_complete) {
          r.exploration_complete = true;
          stop = true;
          return;
        }
        action = d.action;
      }
      s = world.step(action);
      r.reward += s.reward;
    });
    if (stop) break;
  }
  r.steps = world.steps();
  r.coverage = world.coverage();
  std::vector<bool> observed(world.cell_count());
  for (std::size_t i = 0; i < observed.size(); ++i) observed[i] = world.explored(i / world.cols(), i % world.cols());
  mapper.finish(r, world.truth(), observed);
  return r;
}

inline EpisodeReport run_car_episode(const RunConfig& c, std::uint64_t seed, const EpisodeHooks& hooks) {
  const std::string agent = c.resolved_agent();
  const Track track = c.load_track();
  CarWorld world(track, c.car_config(seed));
  const ScanOptions opts = c.scan_options();
  MapperStep mapper(make_mapper(c.mapper, c, track.extent(), seed), c.resolution, c.query_interval);
  ObservedMask mask = track_mask(track);
  const WallFollowParams follow = c.wall_follow_params();

  EpisodeReport r;
  r.env = "car";
  r.mapper = c.mapper;
  r.agent = agent;
  r.seed = seed;
  CarStep s = world.reset();
  OccupancyGrid observation;
  bool have_observation = false;
  for (std::size_t t = 0;; ++t) {
    bool stop = false;
    with_step_index(t, [&] {
      if (hooks.scan_log) hooks.scan_log->write(t, s.scan, s.pose);
      const LabeledPointSet points = build_training_set(s.scan, s.pose, opts);
      mask.mark(s.pose, s.scan, world.theta());
      if (const OccupancyGrid* g = mapper.update(t, s.done, points)) {
        // The car's cell on the query grid; the car never leaves the extent.
        const auto& p = s.pose;
        const Cell cell{std::min(g->rows() - 1, static_cast<std::size_t>(std::max(0.0, p.y / g->resolution()))),
                        std::min(g->cols() - 1, static_cast<std::size_t>(std::max(0.0, p.x / g->resolution())))};
        observation = mapper.mapper().observation(*g, cell);
        have_observation = true;
      }
      if (hooks.on_step)
        hooks.on_step({t, s.scan, s.pose, s.speed, points, have_observation ? &observation : nullptr, s.reward});
      if (s.done) {
        stop = true;
        return;
      }
      const CarCommand cmd = agent == "wall_follow" ? wall_follow_action(s.scan, world.theta(), follow) : CarCommand{};
      s = world.step(cmd.steering, cmd.throttle);
      r.reward += s.reward;
    });
    if (stop) break;
  }
  r.steps = world.steps();
  r.collision = world.state().collision;
  mapper.finish(r, track_truth(track), mask.seen());
  return r;
}

}  // namespace detail

/// Runs one episode on the layout (grid) or noise stream (car) given by
/// `seed`. Failures inside the loop are rethrown as StepError with the
/// original exception nested.
inline EpisodeReport run_episode(const RunConfig& config, std::uint64_t seed, const EpisodeHooks& hooks = {}) {
  config.validate();
  return config.env == "car" ? detail::run_car_episode(config, seed, hooks)
                             : detail::run_grid_episode(config, seed, hooks);
}

struct SuiteReport {
  std::vector<std::uint64_t> train_seeds;
  std::vector<std::uint64_t> eval_seeds;
  std::vector<EpisodeReport> reports;  // mapper-major, then eval seed order
};

/// Runs every configured mapper on every evaluation layout. Scripted agents
/// need no training; the training seeds are only checked for disjointness.
inline SuiteReport run_generalization_suite(const RunConfig& config, const std::vector<std::uint64_t>& train_seeds,
                                            const std::vector<std::uint64_t>& eval_seeds) {
  detail::require(!eval_seeds.empty(), "suite: no evaluation seeds");
  for (auto a : train_seeds)
    for (auto b : eval_seeds)
      detail::require(a != b, "suite: train and eval seeds overlap at " + std::to_string(a));
  SuiteReport out{train_seeds, eval_seeds, {}};
  for (const auto& m : config.mappers_for_suite()) {
    RunConfig c = config;
    c.mapper = m;
    c.suite_mappers.clear();
    for (auto seed : eval_seeds) {
      auto r = run_episode(c, seed);
      r.scores.reset();
      out.reports.push_back(std::move(r));
    }
  }
  return out;
}

namespace detail {

inline std::string opt_exact(const std::optional<double>& v) { return v ? format_exact(*v) : ""; }

}  // namespace detail

/// Per-layout rows then one `mean` row per mapper. Timing-free, so two runs
/// with the same config are byte-identical.
inline void write_suite_csv(std::ostream& os, const SuiteReport& suite) {
  using detail::format_exact;
  using detail::opt_exact;
  os << "layout_seed,mapper,agent,steps,total_reward,r_explore,r_move,r_bonus,r_invalid,r_velocity,r_steering,"
        "r_obstacle,r_collision,coverage,collision,accuracy,auc,model_size_bytes\n";
  const auto row = [&](const std::string& id, const EpisodeReport& r) {
    const auto& w = r.reward;
    os << id << ',' << r.mapper << ',' << r.agent << ',' << r.steps << ',' << format_exact(w.total) << ','
       << format_exact(w.r_explore) << ',' << format_exact(w.r_move) << ',' << format_exact(w.r_bonus) << ','
       << format_exact(w.r_invalid) << ',' << format_exact(w.r_velocity) << ',' << format_exact(w.r_steering) << ','
       << format_exact(w.r_obstacle) << ',' << format_exact(w.r_collision) << ',' << opt_exact(r.coverage) << ','
       << (r.collision ? (*r.collision ? "1" : "0") : "") << ','
       << opt_exact(r.map ? std::optional<double>(r.map->accuracy) : std::nullopt) << ','
       << opt_exact(r.map ? r.map->auc : std::nullopt) << ','
       << (r.model_size_bytes ? std::to_string(*r.model_size_bytes) : "") << '\n';
  };
  for (const auto& r : suite.reports) row(std::to_string(r.seed), r);

  std::vector<std::string> order;
  for (const auto& r : suite.reports)
    if (std::find(order.begin(), order.end(), r.mapper) == order.end()) order.push_back(r.mapper);
  for (const auto& m : order) {
    EpisodeReport mean;
    mean.mapper = m;
    double n = 0, cov = 0, acc = 0, auc = 0, n_cov = 0, n_acc = 0, n_auc = 0, steps = 0, coll = 0, n_coll = 0;
    for (const auto& r : suite.reports) {
      if (r.mapper != m) continue;
      mean.agent = r.agent;
      mean.reward += r.reward;
      steps += static_cast<double>(r.steps);
      n += 1;
      if (r.coverage) cov += *r.coverage, n_cov += 1;
      if (r.collision) coll += *r.collision ? 1 : 0, n_coll += 1;
      if (r.map) acc += r.map->accuracy, n_acc += 1;
      if (r.map && r.map->auc) auc += *r.map->auc, n_auc += 1;
      mean.model_size_bytes = r.model_size_bytes;
    }
    auto& w = mean.reward;
    for (double* f : {&w.r_explore, &w.r_move, &w.r_bonus, &w.r_invalid, &w.r_velocity, &w.r_steering, &w.r_obstacle,
                      &w.r_collision, &w.total})
      *f /= n;
    os << "mean," << m << ',' << mean.agent << ',' << format_exact(steps / n) << ',' << format_exact(w.total) << ','
       << format_exact(w.r_explore) << ',' << format_exact(w.r_move) << ',' << format_exact(w.r_bonus) << ','
       << format_exact(w.r_invalid) << ',' << format_exact(w.r_velocity) << ',' << format_exact(w.r_steering) << ','
       << format_exact(w.r_obstacle) << ',' << format_exact(w.r_collision) << ','
       << (n_cov ? format_exact(cov / n_cov) : "") << ',' << (n_coll ? format_exact(coll / n_coll) : "") << ','
       << (n_acc ? format_exact(acc / n_acc) : "") << ',' << (n_auc ? format_exact(auc / n_auc) : "") << ','
       << (mean.model_size_bytes ? std::to_string(*mean.model_size_bytes) : "") << '\n';
  }
}

inline void write_suite_timings(std::ostream& os, const SuiteReport& suite) {
  os << "layout_seed,mapper,latency_mean_ms,latency_std_ms,steps_timed\n";
  for (const auto& r : suite.reports) {
    os << r.seed << ',' << r.mapper << ',';
    if (r.latency)
      os << detail::format_fixed(r.latency->mean_ms, 6) << ',' << detail::format_fixed(r.latency->std_ms, 6) << ','
         << r.latency->repeats;
    else
      os << ",,";
    os << '\n';
  }
}

/// Rebuilds a map from a recorded scan log and scores it against the layout
/// the config describes (seed = `seed`).
inline EpisodeReport evaluate_scan_log(const RunConfig& config, const std::vector<LoggedScan>& log, std::uint64_t seed) {
  config.validate();
  detail::require(config.mapper != "none", "map-eval needs a mapper");
  detail::require(!log.empty(), "map-eval: empty scan log");
  EpisodeReport r;
  r.env = config.env;
  r.mapper = config.mapper;
  r.agent = "replay";
  r.seed = seed;
  r.steps = log.back().t;

  PolarScan scan;
  ThetaVector theta;
  MapExtent extent;
  OccupancyGrid truth;
  std::optional<ObservedMask> mask;
  if (config.env == "grid") {
    const GridWorld world(config.grid_config(seed));
    scan.max_range = world.max_range();
    scan.fov_degrees = 360.0;
    theta = make_theta(config.ray_count, 360.0);
    extent = world.extent();
    truth = world.truth();
    mask.emplace(world.occupancy(), detail::RayGrid{world.rows(), world.cols(), 1.0, false});
  } else {
    const Track track = config.load_track();
    scan.max_range = config.lidar_range;
    scan.fov_degrees = config.fov;
    theta = make_theta(config.beams, config.fov, config.theta_denominator);
    extent = track.extent();
    truth = detail::track_truth(track);
    mask.emplace(detail::track_mask(track));
  }
  detail::MapperStep mapper(make_mapper(config.mapper, config, extent, seed), config.resolution, config.query_interval);
  const ScanOptions opts = config.scan_options();
  for (std::size_t i = 0; i < log.size(); ++i) {
    const auto& entry = log[i];
    detail::with_step_index(entry.t, [&] {
      detail::require(entry.ranges.size() == theta.angles.size(), "scan log beam count does not match the config");
      scan.ranges = entry.ranges;
      mask->mark(entry.pose, scan, theta);
      mapper.update(entry.t, i + 1 == log.size(), build_training_set(scan, entry.pose, opts));
    });
  }
  mapper.finish(r, truth, mask->seen());
  return r;
}

struct BenchRow {
  std::string mapper;
  std::size_t points = 0;
  LatencyStats ingest;
  LatencyStats cycle;  // ingest + query_grid
  std::size_t model_size_bytes = 0;
};

/// Fixed point sets for the latency benchmark: one grid-world scan with 32
/// beams at M = 1 (64 points) and one racetrack scan with 1080 beams at
/// M = 20 (22680 points).
struct BenchInputs {
  MapExtent small_extent;
  LabeledPointSet small;
  MapExtent large_extent;
  LabeledPointSet large;
};

inline BenchInputs bench_inputs(std::uint64_t seed) {
  BenchInputs in;
  GridConfig g;
  g.seed = seed;
  GridWorld world(g);
  in.small_extent = world.extent();
  in.small = build_training_set(world.last_scan(), world.pose(), 1);
  const Track track = builtin_track("oval");
  CarConfig cc;
  cc.seed = seed;
  CarWorld car(track, cc);
  const auto s = car.reset();
  in.large_extent = track.extent();
  in.large = build_training_set(s.scan, s.pose, 20);
  return in;
}

/// Fresh mapper per repetition, built outside the timed region.
inline BenchRow bench_mapper(const RunConfig& config, const std::string& kind, const MapExtent& extent,
                             const LabeledPointSet& points, std::size_t repeats) {
  BenchRow row;
  row.mapper = kind;
  row.points = points.size();
  std::unique_ptr<Mapper> m;
  const auto fresh = [&] { m = make_mapper(kind, config, extent, config.seed); };
  row.ingest = measure_latency(fresh, [&] { m->ingest(points); }, repeats);
  row.cycle = measure_latency(fresh, [&] {
    m->ingest(points);
    (void)m->query_grid(config.resolution);
  }, repeats);
  row.model_size_bytes = m->model_size_bytes();
  return row;
}

inline nlohmann::ordered_json to_json(const BenchRow& b) {
  const auto stats = [](const LatencyStats& s) {
    return nlohmann::ordered_json{{"mean", s.mean_ms}, {"std", s.std_ms}, {"repeats", s.repeats}};
  };
  return {{"mapper", b.mapper},
          {"points", b.points},
          {"ingest_ms", stats(b.ingest)},
          {"cycle_ms", stats(b.cycle)},
          {"ingest_us_per_point", 1000.0 * b.ingest.mean_ms / static_cast<double>(std::max<std::size_t>(1, b.points))},
          {"model_size_bytes", b.model_size_bytes}};
}

}  // namespace hdogm
