// Command-line front end: synthetic sweep generation, stream inspection,
// benchmark tables and IWE rendering.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "evsink/evsink.hpp"

namespace {

evsink::SceneSpec load_scene(const std::string& arg) {
  if (arg.size() == 1 && (std::isalpha(static_cast<unsigned char>(arg[0])) != 0)) {
    return evsink::preset_scene(arg[0]);
  }
  return evsink::parse_scene(evsink::read_file(arg));
}

evsink::Twist parse_twist(const std::string& arg) {
  std::istringstream ss(arg);
  evsink::Twist t;
  char comma = 0;
  if (!(ss >> t.vx >> comma >> t.vy) || comma != ',') {
    throw CLI::ValidationError("--twist", "expected vx,vy in m/s");
  }
  return t;
}

std::vector<double> parse_speeds(const std::string& arg) {
  std::vector<double> speeds;
  std::stringstream ss(arg);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) speeds.push_back(std::stod(tok));
  }
  if (speeds.empty()) throw CLI::ValidationError("--speeds", "no speeds given");
  return speeds;
}

int run_simulate(const std::string& scene_arg, double speed, std::uint64_t seed,
                 const std::string& out_path, const std::string& truth_path) {
  evsink::SceneSpec scene = load_scene(scene_arg);
  if (speed > 0.0) {
    scene.twist = evsink::Twist{};
    scene.twist.vx = speed;
  }
  scene.noise.seed = seed;
  const evsink::SimResult sim = evsink::simulate(scene);
  evsink::write_events(out_path, sim.events, std::uint16_t(scene.cam.width),
                       std::uint16_t(scene.cam.height));
  if (!truth_path.empty()) {
    evsink::write_file(truth_path, evsink::serialize_manifest(sim.truth));
  }
  std::cout << "events=" << sim.events.size() << " duration_s=" << sim.truth.duration_s
            << " holes=" << sim.truth.holes.size() << "\n";
  return 0;
}

int run_inspect(const std::string& events_path, const std::string& camera_path,
                const std::string& twist_arg, const std::string& out_path,
                const std::string& truth_path, double csk_angle_deg, int trial) {
  const evsink::Evs1File file = evsink::read_events(events_path);
  evsink::CameraModel cam = evsink::parse_camera(evsink::read_file(camera_path));
  if (cam.width != file.width || cam.height != file.height) {
    throw evsink::Error("camera resolution " + std::to_string(cam.width) + "x" +
                        std::to_string(cam.height) + " does not match event file " +
                        std::to_string(file.width) + "x" + std::to_string(file.height));
  }
  const evsink::Twist twist = parse_twist(twist_arg);

  evsink::PipelineConfig config;
  config.csk_angle_deg = csk_angle_deg;
  if (!truth_path.empty()) {
    config.truth = evsink::parse_manifest(evsink::read_file(truth_path)).holes;
  }
  evsink::InspectionReport report = evsink::run_pipeline(file.events, cam, twist, config);
  report.trial = trial;
  evsink::write_file(out_path, evsink::measurements_csv({report}));
  std::cout << "holes=" << report.per_hole.size();
  if (!config.truth.empty()) std::cout << " detection_rate=" << report.detection_rate;
  std::cout << " per_hole_ms=" << report.timing.per_hole_seconds() * 1e3 << "\n";
  return 0;
}

int run_render(const std::string& events_path, const std::string& twist_arg,
               const std::string& out_path, const std::string& camera_path, int window_index) {
  const evsink::Evs1File file = evsink::read_events(events_path);
  evsink::CameraModel cam;
  if (!camera_path.empty()) {
    cam = evsink::parse_camera(evsink::read_file(camera_path));
  } else {
    cam.width = file.width;
    cam.height = file.height;
  }
  const evsink::Twist twist = parse_twist(twist_arg);
  const evsink::Flow flow = evsink::flow_from_twist(twist, cam);

  const std::size_t begin = std::size_t(window_index) * evsink::kMinWindowEvents;
  if (begin >= file.events.size()) {
    throw evsink::Error("window " + std::to_string(window_index) + " starts past the stream");
  }
  const std::size_t end = std::min(file.events.size(), begin + evsink::kMinWindowEvents);
  evsink::EventWindow window;
  window.events.assign(file.events.begin() + std::ptrdiff_t(begin),
                       file.events.begin() + std::ptrdiff_t(end));
  window.t_i_ns = window.events.front().t_ns;
  const evsink::Iwe iwe = evsink::warp_events(window, flow, cam);
  evsink::write_iwe_pgm(out_path, iwe);
  std::cout << "iwe_variance=" << iwe.variance() << " dropped=" << iwe.dropped << "\n";
  return 0;
}

int run_bench(const std::string& scene_arg, const std::string& speeds_arg, int trials,
              const std::string& out_dir, std::uint64_t seed) {
  namespace fs = std::filesystem;
  const evsink::SceneSpec base_scene = load_scene(scene_arg);
  const std::vector<double> speeds = parse_speeds(speeds_arg);
  fs::create_directories(out_dir);

  std::vector<evsink::InspectionReport> reports;
  std::vector<std::pair<double, double>> sweep_times;  // speed -> stream duration
  double min_detection = 1.0;

  for (std::size_t si = 0; si < speeds.size(); ++si) {
    double stream_duration = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
      evsink::SceneSpec scene = base_scene;
      scene.twist = evsink::Twist{};
      scene.twist.vx = speeds[si];
      scene.noise.seed = seed + std::uint64_t(trial) + 1000 * std::uint64_t(si);
      const evsink::SimResult sim = evsink::simulate(scene);
      if (!sim.events.empty()) {
        stream_duration = double(sim.events.back().t_ns - sim.events.front().t_ns) * 1e-9;
      }
      evsink::PipelineConfig config;
      config.csk_angle_deg = scene.holes.empty() ? 100.0 : scene.holes.front().csk_angle_deg;
      config.truth = sim.truth.holes;
      evsink::InspectionReport report =
          evsink::run_pipeline(sim.events, scene.cam, scene.twist, config);
      report.trial = trial;
      min_detection = std::min(min_detection, report.detection_rate);
      reports.push_back(std::move(report));
    }
    sweep_times.emplace_back(speeds[si], stream_duration);
  }

  evsink::write_file((fs::path(out_dir) / "measurements.csv").string(),
                     evsink::measurements_csv(reports));

  const evsink::PrecisionTable table = evsink::aggregate_precision(reports);
  {
    std::ostringstream csv;
    csv << "speed_mps";
    for (const int id : table.hole_ids) csv << ",hole_" << id;
    csv << "\n";
    for (std::size_t s = 0; s < table.speeds.size(); ++s) {
      csv << table.speeds[s];
      for (std::size_t h = 0; h < table.hole_ids.size(); ++h) {
        csv << "," << table.sigma_d[s][h];
      }
      csv << "\n";
    }
    csv << "sigma_r";
    for (const double v : table.sigma_r) csv << "," << v;
    csv << "\naggregate," << table.aggregate << "\n";
    evsink::write_file((fs::path(out_dir) / "precision.csv").string(), csv.str());
  }
  {
    std::ostringstream csv;
    csv << "speed_mps,sweep_time_s\n";
    for (const auto& [speed, dur] : sweep_times) csv << speed << "," << dur << "\n";
    evsink::write_file((fs::path(out_dir) / "sweep_times.csv").string(), csv.str());
  }

  // Per-block execution times, averaged over the windows that produced hole
  // measurements.
  double iwe_s = 0.0, cluster_s = 0.0, fit_s = 0.0, depth_s = 0.0;
  std::size_t measurements = 0;
  for (const auto& rep : reports) {
    iwe_s += rep.timing.measured_iwe_s;
    cluster_s += rep.timing.measured_cluster_s;
    fit_s += rep.timing.measured_fit_s;
    depth_s += rep.timing.measured_depth_s;
    measurements += rep.timing.measurements;
  }
  const double denom = measurements > 0 ? double(measurements) : 1.0;
  {
    std::ostringstream csv;
    csv << "block,seconds_per_hole\n";
    csv << "iwe_reconstruction," << iwe_s / denom << "\n";
    csv << "mean_shift_clustering," << cluster_s / denom << "\n";
    csv << "circle_fitting," << fit_s / denom << "\n";
    csv << "depth_estimation," << depth_s / denom << "\n";
    csv << "total," << (iwe_s + cluster_s + fit_s + depth_s) / denom << "\n";
    evsink::write_file((fs::path(out_dir) / "timing.csv").string(), csv.str());
  }
  {
    std::ostringstream sum;
    sum << "runs = " << reports.size() << "\n";
    sum << "min_detection_rate = " << min_detection << "\n";
    sum << "aggregate_sigma_mm = " << table.aggregate << "\n";
    sum << "per_hole_seconds = " << (iwe_s + cluster_s + fit_s + depth_s) / denom << "\n";
    sum << "stage_order = clustering:" << cluster_s / denom << " iwe:" << iwe_s / denom
        << " fit:" << fit_s / denom << " depth:" << depth_s / denom << "\n";
    evsink::write_file((fs::path(out_dir) / "summary.txt").string(), sum.str());
    std::cout << sum.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"event-based countersink inspection toolkit"};
  app.require_subcommand(1);

  std::string scene_arg, events_path, camera_path, twist_arg, out_path, truth_path, speeds_arg;
  double speed = 0.0;
  double csk_angle_deg = 100.0;
  std::uint64_t seed = 1;
  int trials = 10;
  int trial = 0;
  int window_index = 0;

  auto* sim = app.add_subcommand("simulate", "generate a synthetic sweep event stream");
  sim->add_option("--scene", scene_arg, "scene file or preset A/B/C")->required();
  sim->add_option("--speed", speed, "sweep speed m/s (overrides the scene twist)");
  sim->add_option("--seed", seed, "noise seed");
  sim->add_option("--out", out_path, "output EVS1 file")->required();
  sim->add_option("--truth", truth_path, "ground-truth manifest output");

  auto* insp = app.add_subcommand("inspect", "run the inspection pipeline on an event stream");
  insp->add_option("--events", events_path, "EVS1 input")->required();
  insp->add_option("--camera", camera_path, "camera config file")->required();
  insp->add_option("--twist", twist_arg, "sweep twist vx,vy in m/s")->required();
  insp->add_option("--out", out_path, "measurement CSV output")->required();
  insp->add_option("--truth", truth_path, "optional ground-truth manifest for scoring");
  insp->add_option("--csk-angle-deg", csk_angle_deg, "countersink included angle");
  insp->add_option("--trial", trial, "trial index recorded in the CSV");

  auto* bench = app.add_subcommand("bench", "precision/timing benchmark over speeds and trials");
  bench->add_option("--scene", scene_arg, "scene file or preset A/B/C")->required();
  bench->add_option("--speeds", speeds_arg, "comma-separated sweep speeds m/s")->required();
  bench->add_option("--trials", trials, "trials per speed");
  bench->add_option("--out", out_path, "output directory")->required();
  bench->add_option("--seed", seed, "base noise seed");

  auto* render = app.add_subcommand("render", "write one window's IWE as a 16-bit PGM");
  render->add_option("--events", events_path, "EVS1 input")->required();
  render->add_option("--twist", twist_arg, "compensation twist vx,vy in m/s")->required();
  render->add_option("--out", out_path, "PGM output")->required();
  render->add_option("--camera", camera_path, "camera config (defaults to file header size)");
  render->add_option("--window", window_index, "window index into the stream");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }

  try {
    if (sim->parsed()) return run_simulate(scene_arg, speed, seed, out_path, truth_path);
    if (insp->parsed()) {
      return run_inspect(events_path, camera_path, twist_arg, out_path, truth_path, csk_angle_deg,
                         trial);
    }
    if (bench->parsed()) return run_bench(scene_arg, speeds_arg, trials, out_path, seed);
    if (render->parsed()) {
      return run_render(events_path, twist_arg, out_path, camera_path, window_index);
    }
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const evsink::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
