#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "evsink/circle_fit.hpp"
#include "evsink/cluster.hpp"
#include "evsink/core.hpp"
#include "evsink/errors.hpp"
#include "evsink/motion_comp.hpp"

namespace evsink {

// Fitted radii from pixels to millimeters via the similar-triangle scale
// Z/F. F is the horizontal focal length.
inline std::pair<double, double> pixels_to_mm(const CircleFitParams& params,
                                              const CameraModel& cam) {
  const double scale = cam.z_standoff_mm / cam.fx;
  return {scale * params.inner_radius, scale * params.outer_radius};
}

// Countersink depth from its radii and included cone angle.
inline double estimate_depth(double inner_radius_mm, double outer_radius_mm,
                             double csk_angle_deg) {
  if (!(csk_angle_deg > 0.0 && csk_angle_deg < 180.0)) {
    throw InvalidAngleError("countersink angle " + std::to_string(csk_angle_deg) +
                            " outside (0, 180)");
  }
  if (outer_radius_mm < inner_radius_mm) {
    throw InvertedRadiiError("outer radius smaller than inner radius");
  }
  const double half_rad = 0.5 * csk_angle_deg * M_PI / 180.0;
  return (outer_radius_mm - inner_radius_mm) / std::tan(half_rad);
}

struct PipelineConfig {
  std::size_t window_events = kMinWindowEvents;
  std::size_t window_stride = kMinWindowEvents / 2;  // 50% overlap
  std::int32_t activation_threshold = 1;
  int opening_radius = 1;
  double bandwidth_px = 25.0;
  double select_radius_px = 60.0;  // clusters farther from the principal point are skipped
  double dedupe_radius_px = 15.0;  // same-hole radius across overlapping windows
  double match_radius_px = 15.0;   // hole-to-truth matching radius
  double csk_angle_deg = 100.0;
  FitConfig fit;
  MeanShiftConfig mean_shift_cfg;
  std::vector<HoleTruth> truth;  // optional; enables detection-rate scoring
};

// Wall-clock seconds per pipeline block, split into totals over all windows
// and totals over the windows that produced a measurement.
struct StageTiming {
  double iwe_s = 0.0;
  double cluster_s = 0.0;
  double fit_s = 0.0;
  double depth_s = 0.0;
  double measured_iwe_s = 0.0;
  double measured_cluster_s = 0.0;
  double measured_fit_s = 0.0;
  double measured_depth_s = 0.0;
  std::size_t windows = 0;
  std::size_t measurement_windows = 0;
  std::size_t measurements = 0;

  // Mean time spent inspecting one countersink: the four blocks of the
  // windows that yielded its measurement.
  [[nodiscard]] double per_hole_seconds() const {
    if (measurements == 0) return 0.0;
    return (measured_iwe_s + measured_cluster_s + measured_fit_s + measured_depth_s) /
           double(measurements);
  }
};

// One accepted fit with its provenance.
struct PipelineMeasurement {
  HoleMeasurement hole;
  double world_x_mm = 0.0;  // workpiece-plane frame, origin under camera at t=0
  double world_y_mm = 0.0;
  double centroid_pp_dist_px = 0.0;
  std::int64_t window_t_i_ns = 0;
  FitReport fit;
};

struct InspectionReport {
  std::vector<HoleMeasurement> per_hole;   // deduplicated, in sweep order
  std::vector<double> per_hole_sigma;      // filled by aggregate_precision
  double detection_rate = 0.0;
  StageTiming timing;
  double speed_mps = 0.0;
  int trial = 0;
  std::vector<PipelineMeasurement> details;
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace detail

// Runs the full per-window pipeline over a stream: window formation, flow
// from the known twist, event warping, morphological denoising, mean-shift
// segmentation, robust circle fitting and metric depth. Failures in one
// window or cluster skip that candidate without aborting the run.
inline InspectionReport run_pipeline(const EventStream& stream, const CameraModel& cam,
                                     const Twist& twist, const PipelineConfig& config = {}) {
  InspectionReport report;
  report.speed_mps = twist.linear_speed();
  if (stream.empty()) {
    report.detection_rate = 0.0;
    return report;
  }

  const Flow flow = flow_from_twist(twist, cam);
  const double pitch_x = cam.z_standoff_mm / cam.fx;
  const double pitch_y = cam.z_standoff_mm / cam.fy;
  const double vx_mm = twist.vx * 1000.0;
  const double vy_mm = twist.vy * 1000.0;

  std::vector<PipelineMeasurement> raw;
  StageTiming& timing = report.timing;

  for (std::size_t start = 0; start + config.window_events <= stream.size();
       start += config.window_stride) {
    EventWindow window;
    window.events.assign(stream.begin() + std::ptrdiff_t(start),
                         stream.begin() + std::ptrdiff_t(start + config.window_events));
    window.t_i_ns = window.events.front().t_ns;
    ++timing.windows;

    auto t0 = detail::Clock::now();
    const Iwe iwe = warp_events(window, flow, cam);
    const SaePoints sae = extract_sae(iwe, config.activation_threshold, config.opening_radius);
    const double iwe_s = detail::seconds_since(t0);
    timing.iwe_s += iwe_s;
    if (sae.empty()) continue;

    t0 = detail::Clock::now();
    std::vector<Cluster> clusters;
    try {
      clusters = mean_shift(sae, config.bandwidth_px, config.mean_shift_cfg);
    } catch (const Error&) {
      timing.cluster_s += detail::seconds_since(t0);
      continue;
    }
    const std::vector<std::size_t> picked =
        select_inspection_clusters(clusters, cam, config.select_radius_px);
    const double cluster_s = detail::seconds_since(t0);
    timing.cluster_s += cluster_s;
    if (picked.empty()) continue;

    double fit_s = 0.0;
    double depth_s = 0.0;
    std::size_t produced = 0;
    for (const std::size_t ci : picked) {
      const Cluster& cl = clusters[ci];
      t0 = detail::Clock::now();
      FitReport fit;
      try {
        fit = fit_circles(cl, config.fit);
      } catch (const Error&) {
        fit_s += detail::seconds_since(t0);
        continue;  // this candidate is reported as undetected
      }
      fit_s += detail::seconds_since(t0);
      if (!fit.converged) continue;

      t0 = detail::Clock::now();
      PipelineMeasurement m;
      try {
        const auto [r_mm, cskr_mm] = pixels_to_mm(fit.params, cam);
        m.hole.inner_radius_mm = r_mm;
        m.hole.outer_radius_mm = cskr_mm;
        m.hole.depth_mm = estimate_depth(r_mm, cskr_mm, config.csk_angle_deg);
      } catch (const Error&) {
        depth_s += detail::seconds_since(t0);
        continue;
      }
      depth_s += detail::seconds_since(t0);

      const double t_i_s = double(window.t_i_ns) * 1e-9;
      m.hole.center_u_px = fit.params.center_x;
      m.hole.center_v_px = fit.params.center_y;
      m.world_x_mm = (fit.params.center_x - cam.u0) * pitch_x + vx_mm * t_i_s;
      m.world_y_mm = (fit.params.center_y - cam.v0) * pitch_y + vy_mm * t_i_s;
      m.centroid_pp_dist_px = std::hypot(cl.centroid_x - cam.u0, cl.centroid_y - cam.v0);
      m.window_t_i_ns = window.t_i_ns;
      m.fit = fit;
      raw.push_back(m);
      ++produced;
    }
    timing.fit_s += fit_s;
    timing.depth_s += depth_s;
    if (produced > 0) {
      ++timing.measurement_windows;
      timing.measurements += produced;
      timing.measured_iwe_s += iwe_s;
      timing.measured_cluster_s += cluster_s;
      timing.measured_fit_s += fit_s;
      timing.measured_depth_s += depth_s;
    }
  }

  // Deduplicate across overlapping windows: same workpiece location within
  // the dedupe radius, keep the measurement taken nearest the optical axis.
  std::vector<PipelineMeasurement> kept;
  for (const auto& m : raw) {
    bool merged = false;
    for (auto& k : kept) {
      const double d_px = std::hypot((m.world_x_mm - k.world_x_mm) / pitch_x,
                                     (m.world_y_mm - k.world_y_mm) / pitch_y);
      if (d_px < config.dedupe_radius_px) {
        if (m.centroid_pp_dist_px < k.centroid_pp_dist_px) k = m;
        merged = true;
        break;
      }
    }
    if (!merged) kept.push_back(m);
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [&](const PipelineMeasurement& a, const PipelineMeasurement& b) {
                     const double pa = a.world_x_mm * vx_mm + a.world_y_mm * vy_mm;
                     const double pb = b.world_x_mm * vx_mm + b.world_y_mm * vy_mm;
                     return pa < pb;
                   });

  // Match against ground truth when provided. A truth hole's workpiece
  // position equals the camera path position at its center-crossing time.
  if (!config.truth.empty()) {
    std::size_t matched = 0;
    for (auto& k : kept) k.hole.hole_id = -1;
    for (const auto& t : config.truth) {
      const double t_c_s = double(t.t_center_ns) * 1e-9;
      const double tx = vx_mm * t_c_s;
      const double ty = vy_mm * t_c_s;
      PipelineMeasurement* best = nullptr;
      double best_d = config.match_radius_px;
      for (auto& k : kept) {
        if (k.hole.hole_id >= 0) continue;
        const double d_px =
            std::hypot((k.world_x_mm - tx) / pitch_x, (k.world_y_mm - ty) / pitch_y);
        if (d_px < best_d) {
          best_d = d_px;
          best = &k;
        }
      }
      if (best != nullptr) {
        best->hole.hole_id = t.id;
        ++matched;
      }
    }
    report.detection_rate = config.truth.empty() ? 0.0 : double(matched) / double(config.truth.size());
  } else {
    for (std::size_t i = 0; i < kept.size(); ++i) kept[i].hole.hole_id = int(i);
    report.detection_rate = 0.0;
  }

  report.details = kept;
  report.per_hole.reserve(kept.size());
  for (const auto& k : kept) report.per_hole.push_back(k.hole);
  return report;
}

// Standard deviation over repeated trials of one hole's depth.
inline double depth_sigma(const std::vector<double>& depths) {
  if (depths.size() < 2) return 0.0;
  double mean = 0.0;
  for (const double d : depths) mean += d;
  mean /= double(depths.size());
  double acc = 0.0;
  for (const double d : depths) acc += (d - mean) * (d - mean);
  return std::sqrt(acc / double(depths.size()));
}

// Precision summary over repeated trials at several sweep speeds, shaped
// like the measurement campaign tables: one sigma per (hole, speed), a
// pooled sigma per hole, and their mean as the aggregate.
struct PrecisionTable {
  std::vector<double> speeds;                 // ascending
  std::vector<int> hole_ids;                  // ascending
  std::vector<std::vector<double>> sigma_d;   // [speed][hole]
  std::vector<std::vector<int>> trial_counts; // [speed][hole]
  std::vector<double> sigma_r;                // pooled per hole across speeds
  double aggregate = 0.0;                     // mean of sigma_r
};

inline PrecisionTable aggregate_precision(const std::vector<InspectionReport>& reports) {
  if (reports.size() < 2) {
    throw InsufficientTrialsError("precision aggregation needs at least two trials");
  }
  std::map<double, std::map<int, std::vector<double>>> depths;  // speed -> hole -> trials
  for (const auto& rep : reports) {
    for (const auto& h : rep.per_hole) {
      if (h.hole_id < 0) continue;
      depths[rep.speed_mps][h.hole_id].push_back(h.depth_mm);
    }
  }
  PrecisionTable table;
  std::map<int, bool> hole_seen;
  for (const auto& [speed, holes] : depths) {
    table.speeds.push_back(speed);
    for (const auto& [id, _] : holes) hole_seen[id] = true;
  }
  for (const auto& [id, _] : hole_seen) table.hole_ids.push_back(id);

  table.sigma_d.assign(table.speeds.size(), std::vector<double>(table.hole_ids.size(), 0.0));
  table.trial_counts.assign(table.speeds.size(), std::vector<int>(table.hole_ids.size(), 0));
  for (std::size_t s = 0; s < table.speeds.size(); ++s) {
    const auto& holes = depths.at(table.speeds[s]);
    for (std::size_t h = 0; h < table.hole_ids.size(); ++h) {
      const auto it = holes.find(table.hole_ids[h]);
      if (it == holes.end()) continue;
      table.sigma_d[s][h] = depth_sigma(it->second);
      table.trial_counts[s][h] = int(it->second.size());
    }
  }
  table.sigma_r.assign(table.hole_ids.size(), 0.0);
  for (std::size_t h = 0; h < table.hole_ids.size(); ++h) {
    double weighted = 0.0;
    int total = 0;
    for (std::size_t s = 0; s < table.speeds.size(); ++s) {
      const int n = table.trial_counts[s][h];
      weighted += double(n) * table.sigma_d[s][h] * table.sigma_d[s][h];
      total += n;
    }
    table.sigma_r[h] = total > 0 ? std::sqrt(weighted / double(total)) : 0.0;
  }
  if (!table.sigma_r.empty()) {
    double acc = 0.0;
    for (const double v : table.sigma_r) acc += v;
    table.aggregate = acc / double(table.sigma_r.size());
  }
  return table;
}

}  // namespace evsink
