// shape_cli: single-scene estimation, Monte-Carlo experiments and the
// clipping benchmark.
//
// Exit codes: 0 success, 2 usage or parse error, 3 estimator error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shape/shape.hpp"

using namespace shape;

namespace {

constexpr int kExitParse = 2;
constexpr int kExitEstimator = 3;

// Errors caused by the files or flags rather than by the estimator.
bool is_input_error(ErrorCode c) {
  switch (c) {
    case ErrorCode::kParse:
    case ErrorCode::kInvalidConfig:
    case ErrorCode::kInvalidCamera:
    case ErrorCode::kInvalidFov:
    case ErrorCode::kInvalidGrid:
      return true;
    default:
      return false;
  }
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, sep);) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::kParse, "cannot write " + path);
  return os;
}

SceneConfig load_config(const std::string& path) {
  return path.empty() ? SceneConfig{} : config_from_json(read_json_file(path));
}

struct EstimateArgs {
  std::string scene;
  std::string method = "shape";
  std::string mode = "known";
  double world = kDefaultWorldHalfWidth;
};

int cmd_estimate(const EstimateArgs& a) {
  const Scene scene = scene_from_json(read_json_file(a.scene));
  const Method method = *parse_method(a.method);
  const Mode mode = *parse_mode(a.mode);
  if (mode == Mode::kKnownOrientation && !scene.true_pose) {
    throw Error(ErrorCode::kParse, "known mode needs \"pose\" in the scene file");
  }
  EstimatorSettings settings;
  settings.world = ConvexPolygon::square(a.world);
  const PoseEstimate est = run_method(method, mode, scene, settings);

  std::cout << "method=" << to_string(method) << '\n'
            << "mode=" << a.mode << '\n'
            << "t_x_hat=" << num(est.t_x_hat) << '\n'
            << "t_z_hat=" << num(est.t_z_hat) << '\n';
  if (est.theta_hat) std::cout << "theta_hat=" << num(*est.theta_hat) << '\n';
  if (scene.true_pose) {
    std::cout << "sq_err=" << num(squared_location_error(est, *scene.true_pose)) << '\n';
    if (est.theta_hat) {
      std::cout << "theta_err=" << num(angle_difference(*est.theta_hat, scene.true_pose->theta)) << '\n';
    }
  }
  if (method == Method::kShape) {
    // Region at the orientation used (known) or estimated (full pose).
    const double theta = est.theta_hat ? *est.theta_hat : scene.true_pose->theta;
    const ConsistencySlice slice =
        location_region(scene.camera, theta, scene.points, scene.observations, settings.world);
    std::cout << "region_area=" << num(slice.area) << '\n'
              << "region_vertices=" << slice.region.size() << '\n'
              << "region_clipped=" << (slice.touches_world ? 1 : 0) << '\n';
    for (const Point2& v : slice.region.vertices()) std::cout << "vertex=" << num(v.x) << ',' << num(v.z) << '\n';
  }
  return 0;
}

struct SimulateArgs {
  std::string config;
  int m_min = 5;
  int m_max = 15;
  int trials = 1000;
  std::string methods = "shape,l2,linf";
  std::string mode = "known";
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string dat;
  bool no_timing = false;
  int threads = 0;
  int fine_k = 0;
};

int cmd_simulate(const SimulateArgs& a) {
  SimulationOptions opt;
  opt.config = load_config(a.config);
  if (a.seed) opt.config.seed = *a.seed;
  opt.m_min = a.m_min;
  opt.m_max = a.m_max;
  opt.trials = a.trials;
  opt.mode = *parse_mode(a.mode);
  opt.methods.clear();
  for (const std::string& name : split(a.methods, ',')) {
    const auto m = parse_method(name);
    if (!m) throw Error(ErrorCode::kParse, "unknown method " + name);
    opt.methods.push_back(*m);
  }
  opt.settings.grid = GridSpec::around(opt.config.pose_box());
  if (a.fine_k > 0) opt.settings.sweep.fine_k = a.fine_k;
  if (a.threads > 0) opt.threads = a.threads;

  const ExperimentResult result = run_simulation(opt);
  std::ofstream os = open_out(a.out);
  write_csv(os, result, !a.no_timing);
  if (!a.dat.empty()) {
    std::ofstream ds = open_out(a.dat);
    write_dat(ds, result);
  }
  for (Method m : opt.methods) {
    std::printf("%s slope=%.4f\n", to_string(m), loglog_slope(result, m));
  }
  return 0;
}

struct BenchArgs {
  std::string config;
  std::string m_list = "100,200,1000,2000";
  std::string out;
  int reps = 51;
};

int cmd_bench(const BenchArgs& a) {
  std::vector<int> ms;
  for (const std::string& s : split(a.m_list, ',')) {
    try {
      ms.push_back(std::stoi(s));
    } catch (const std::exception&) {
      throw Error(ErrorCode::kParse, "bad M value " + s);
    }
  }
  const auto rows = run_bench(load_config(a.config), ms, a.reps);
  std::ofstream os = open_out(a.out);
  write_bench_csv(os, rows);
  write_bench_csv(std::cout, rows);
  return 0;
}

struct GenerateArgs {
  std::string config;
  std::uint64_t stream = 0;
  std::string out;
  bool hide_pose = false;
};

int cmd_generate(const GenerateArgs& a) {
  Scene scene = generate(load_config(a.config), a.stream);
  if (a.hide_pose) scene.true_pose.reset();
  const std::string text = to_json(scene).dump(2) + "\n";
  if (a.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream os = open_out(a.out);
    os << text;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Camera pose from quantized 1-D images of known points"};
  app.require_subcommand(1);
  const auto methods = CLI::IsMember({"shape", "l2", "linf"});
  const auto modes = CLI::IsMember({"known", "full"});

  EstimateArgs ea;
  auto* est = app.add_subcommand("estimate", "Estimate the pose for one scene file");
  est->add_option("--scene", ea.scene, "Scene JSON")->required()->check(CLI::ExistingFile);
  est->add_option("--method", ea.method, "shape | l2 | linf")->check(methods)->capture_default_str();
  est->add_option("--mode", ea.mode, "known | full")->check(modes)->capture_default_str();
  est->add_option("--world", ea.world, "Half-width of the world box, metres")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "Monte-Carlo error versus M");
  sim->add_option("--config", sa.config, "SceneConfig JSON (defaults when omitted)")->check(CLI::ExistingFile);
  sim->add_option("--m-min", sa.m_min)->check(CLI::PositiveNumber)->capture_default_str();
  sim->add_option("--m-max", sa.m_max)->check(CLI::PositiveNumber)->capture_default_str();
  sim->add_option("--trials", sa.trials)->check(CLI::PositiveNumber)->capture_default_str();
  sim->add_option("--methods", sa.methods, "Comma-separated subset of shape,l2,linf")->capture_default_str();
  sim->add_option("--mode", sa.mode, "known | full")->check(modes)->capture_default_str();
  sim->add_option("--seed", sa.seed, "Overrides the config seed");
  sim->add_option("--out", sa.out, "CSV output")->required();
  sim->add_option("--dat", sa.dat, "Optional gnuplot data output");
  sim->add_flag("--no-timing", sa.no_timing, "Write 0 for median_ms (byte-stable output)");
  sim->add_option("--threads", sa.threads, "Worker count (default SHAPE_THREADS or all cores)");
  sim->add_option("--fine-k", sa.fine_k, "Fine orientation samples for full-pose SHAPE");

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Timing of location_region versus M");
  bench->add_option("--config", ba.config, "SceneConfig JSON")->check(CLI::ExistingFile);
  bench->add_option("--m", ba.m_list, "Ascending comma-separated M values")->capture_default_str();
  bench->add_option("--out", ba.out, "CSV output")->required();
  bench->add_option("--reps", ba.reps)->check(CLI::PositiveNumber)->capture_default_str();

  GenerateArgs ga;
  auto* gen = app.add_subcommand("generate", "Write one random scene as JSON");
  gen->add_option("--config", ga.config, "SceneConfig JSON")->check(CLI::ExistingFile);
  gen->add_option("--stream", ga.stream, "Scene index")->capture_default_str();
  gen->add_option("--out", ga.out, "Output file (stdout when omitted)");
  gen->add_flag("--hide-pose", ga.hide_pose, "Omit the ground-truth pose");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitParse;
  }

  try {
    if (*est) return cmd_estimate(ea);
    if (*sim) return cmd_simulate(sa);
    if (*bench) return cmd_bench(ba);
    if (*gen) return cmd_generate(ga);
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return is_input_error(e.code()) ? kExitParse : kExitEstimator;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitEstimator;
  }
  return kExitParse;
}
