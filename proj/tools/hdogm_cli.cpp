// hdogm: run mapping episodes, replay scan logs, benchmark mappers.
//
//   hdogm explore  --config run.cfg --out out/
//   hdogm race     --config race.cfg
//   hdogm map-eval --config run.cfg --log out/scan_log_0.csv
//   hdogm bench    --config run.cfg
//   hdogm gen-suite --config suite.cfg
//
// Exit status: 0 success, 2 configuration error, 3 runtime error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "hdogm/harness.hpp"

namespace fs = std::filesystem;
using namespace hdogm;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string log;
};

RunConfig resolve(const Options& o, const std::string& env) {
  RunConfig base;
  if (!env.empty()) base.env = env;
  RunConfig c = o.config.empty() ? base : load_config(o.config, base);
  if (!env.empty() && c.env != env) throw ConfigError("this subcommand runs env = " + env + ", config has env = " + c.env);
  if (o.seed) c.seed = *o.seed;
  if (!o.out.empty()) c.out = o.out;
  c.validate();
  return c;
}

fs::path prepare_out(const RunConfig& c) {
  const fs::path dir = c.out;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(dir.string(), "cannot create output directory: " + ec.message());
  std::ofstream os(dir / "config.txt");
  if (!os) throw IoError((dir / "config.txt").string(), "cannot open for writing");
  write_config(os, c);
  return dir;
}

void write_json(const fs::path& path, const nlohmann::ordered_json& j) {
  std::ofstream os(path);
  if (!os) throw IoError(path.string(), "cannot open for writing");
  os << j.dump(2) << '\n';
  if (!os) throw IoError(path.string(), "write failed");
}

std::string summary(const EpisodeReport& r) {
  std::string s = r.env + " seed " + std::to_string(r.seed) + ": steps " + std::to_string(r.steps) + ", reward " +
                  detail::format_fixed(r.reward.total, 3);
  if (r.coverage) s += ", coverage " + detail::format_fixed(*r.coverage, 3);
  if (r.collision) s += std::string(", collision ") + (*r.collision ? "yes" : "no");
  if (r.map) {
    s += ", accuracy " + detail::format_fixed(r.map->accuracy, 3);
    if (r.map->auc) s += ", auc " + detail::format_fixed(*r.map->auc, 3);
  }
  if (r.latency)
    s += ", latency " + detail::format_fixed(r.latency->mean_ms, 3) + " +/- " + detail::format_fixed(r.latency->std_ms, 3) +
         " ms";
  return s;
}

void run_episodes(const Options& o, const std::string& env) {
  const RunConfig c = resolve(o, env);
  const fs::path dir = prepare_out(c);
  for (std::size_t e = 0; e < c.episodes; ++e) {
    const std::uint64_t seed = c.seed + e;
    const fs::path log_path = dir / ("scan_log_" + std::to_string(e) + ".csv");
    std::ofstream log(log_path);
    if (!log) throw IoError(log_path.string(), "cannot open for writing");
    ScanLogWriter writer(log);
    EpisodeHooks hooks;
    hooks.scan_log = &writer;
    const EpisodeReport r = run_episode(c, seed, hooks);
    if (!log.flush()) throw IoError(log_path.string(), "write failed");
    write_json(dir / ("report_" + std::to_string(e) + ".json"), to_json(r));
    if (r.scores) {
      export_grid(*r.scores, (dir / ("map_" + std::to_string(e) + ".csv")).string(), GridFormat::Csv);
      export_grid(*r.scores, (dir / ("map_" + std::to_string(e) + ".pgm")).string(), GridFormat::Pgm);
    }
    std::cout << summary(r) << '\n';
  }
}

void map_eval(const Options& o) {
  const RunConfig c = resolve(o, "");
  const auto scans = read_scan_log(o.log);
  const EpisodeReport r = evaluate_scan_log(c, scans, c.seed);
  const fs::path dir = prepare_out(c);
  write_json(dir / "map_eval.json", to_json(r));
  export_grid(*r.scores, (dir / "map_eval.csv").string(), GridFormat::Csv);
  std::cout << "replayed " << scans.size() << " scans, " << r.map->cells << " observed cells, accuracy "
            << detail::format_fixed(r.map->accuracy, 4) << ", auc "
            << (r.map->auc ? detail::format_fixed(*r.map->auc, 4) : std::string("n/a")) << '\n';
}

void bench(const Options& o) {
  const RunConfig c = resolve(o, "");
  const fs::path dir = prepare_out(c);
  const BenchInputs in = bench_inputs(c.seed);
  const std::vector<std::string> mappers =
      c.suite_mappers.empty() ? std::vector<std::string>{"vsa", "bhm"} : c.suite_mappers;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  nlohmann::ordered_json scaling = nlohmann::ordered_json::object();
  std::map<std::string, double> large_ms;
  for (const auto& m : mappers) {
    if (m == "none") continue;
    const BenchRow small = bench_mapper(c, m, in.small_extent, in.small, c.latency_repeats);
    const BenchRow large = bench_mapper(c, m, in.large_extent, in.large, c.latency_repeats);
    rows.push_back(to_json(small));
    rows.push_back(to_json(large));
    const double ratio = large.ingest.mean_ms / small.ingest.mean_ms;
    const double per_point = ratio * static_cast<double>(small.points) / static_cast<double>(large.points);
    scaling[m] = {{"ingest_ratio", ratio}, {"per_point_ratio", per_point}};
    large_ms[m] = large.ingest.mean_ms;
    for (const auto* row : {&small, &large})
      std::printf("%-4s %6zu points  ingest %10.4f +/- %.4f ms  cycle %10.4f +/- %.4f ms  model %zu B\n", m.c_str(),
                  row->points, row->ingest.mean_ms, row->ingest.std_ms, row->cycle.mean_ms, row->cycle.std_ms,
                  row->model_size_bytes);
    std::printf("%-4s ingest ratio %.2f, per-point ratio %.3f\n", m.c_str(), ratio, per_point);
  }
  nlohmann::ordered_json j{{"rows", rows}, {"scaling", scaling}};
  if (large_ms.count("vsa") && large_ms.count("bhm")) {
    const char* faster = large_ms["bhm"] < large_ms["vsa"] ? "bhm" : "vsa";
    j["faster_at_22680_points"] = faster;
    std::printf("faster at %zu points: %s\n", in.large.size(), faster);
  }
  write_json(dir / "bench.json", j);
}

void gen_suite(const Options& o) {
  const RunConfig c = resolve(o, "");
  if (c.eval_seeds.empty()) throw ConfigError("gen-suite needs eval_seeds");
  const fs::path dir = prepare_out(c);
  const SuiteReport suite = run_generalization_suite(c, c.train_seeds, c.eval_seeds);
  {
    std::ofstream os(dir / "suite.csv");
    if (!os) throw IoError((dir / "suite.csv").string(), "cannot open for writing");
    write_suite_csv(os, suite);
  }
  {
    std::ofstream os(dir / "timings.csv");
    if (!os) throw IoError((dir / "timings.csv").string(), "cannot open for writing");
    write_suite_timings(os, suite);
  }
  std::cout << suite.reports.size() << " episodes -> " << (dir / "suite.csv").string() << '\n';
}

void print_chain(const std::exception& e, int depth = 0) {
  std::cerr << (depth ? "  caused by: " : "error: ") << e.what() << '\n';
  try {
    std::rethrow_if_nested(e);
  } catch (const std::exception& inner) {
    print_chain(inner, depth + 1);
  } catch (...) {
  }
}

bool nested_config_error(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return true;
  try {
    std::rethrow_if_nested(e);
  } catch (const std::exception& inner) {
    return nested_config_error(inner);
  } catch (...) {
  }
  return false;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyperdimensional and Hilbert-map occupancy mapping benchmarks"};
  app.require_subcommand(1);
  Options o;
  const auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "key = value run configuration")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "base seed (overrides the config)");
    sub->add_option("--out", o.out, "output directory (overrides the config)");
  };
  auto* explore = app.add_subcommand("explore", "grid-world exploration episodes");
  auto* race = app.add_subcommand("race", "racetrack episodes");
  auto* eval = app.add_subcommand("map-eval", "map fidelity from a recorded scan log");
  auto* bench_cmd = app.add_subcommand("bench", "mapper latency and model size");
  auto* suite = app.add_subcommand("gen-suite", "episodes over many layouts");
  for (auto* s : {explore, race, eval, bench_cmd, suite}) common(s);
  eval->add_option("--log", o.log, "scan log CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*explore) run_episodes(o, "grid");
    else if (*race) run_episodes(o, "car");
    else if (*eval) map_eval(o);
    else if (*bench_cmd) bench(o);
    else if (*suite) gen_suite(o);
  } catch (const std::exception& e) {
    print_chain(e);
    return nested_config_error(e) ? kExitConfig : kExitRuntime;
  }
  return 0;
}
