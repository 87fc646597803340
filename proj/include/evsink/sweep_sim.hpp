#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "evsink/core.hpp"
#include "evsink/errors.hpp"
#include "evsink/motion_comp.hpp"
#include "evsink/parallel.hpp"

namespace evsink {

// One countersunk hole on the workpiece plane.
struct HoleSpec {
  double center_x_mm = 0.0;
  double center_y_mm = 0.0;
  double pilot_radius_mm = 2.0;  // inner bore
  double csk_radius_mm = 2.95;   // outer countersink rim
  double csk_angle_deg = 100.0;  // included cone angle

  // Depth follows from the cone geometry.
  [[nodiscard]] double true_depth_mm() const {
    const double half = 0.5 * csk_angle_deg * M_PI / 180.0;
    return (csk_radius_mm - pilot_radius_mm) / std::tan(half);
  }
};

struct NoiseSpec {
  double background_rate_hz_per_px = 0.02;  // uniform sensor noise
  double edge_jitter_px = 0.5;              // gaussian sigma on event position
  double reflection_arc_fraction = 0.12;    // share of bore-reflection outliers
  double timestamp_jitter_ns = 2000.0;      // gaussian sigma on event time
  std::uint64_t seed = 1;

  [[nodiscard]] static NoiseSpec off() {
    NoiseSpec n;
    n.background_rate_hz_per_px = 0.0;
    n.edge_jitter_px = 0.0;
    n.reflection_arc_fraction = 0.0;
    n.timestamp_jitter_ns = 0.0;
    return n;
  }
};

struct SceneSpec {
  std::vector<HoleSpec> holes;
  double workpiece_span_m = 1.5;  // sweep length from first to last hole
  CameraModel cam;
  Twist twist;  // planar for the default profile
  double contrast_threshold = 0.34;
  NoiseSpec noise;
};

struct GroundTruth {
  std::vector<HoleTruth> holes;
  double duration_s = 0.0;
  double speed_mps = 0.0;
};

struct SimResult {
  EventStream events;
  GroundTruth truth;
};

// Reflectance levels of the rendered scene. The annulus sits below the
// surrounding surface with a step at both rims so each rim sheds a compact
// burst of events, and the shallow ramp across the cone leaves the space
// between the rims quiet.
inline constexpr double kBgIntensity = 1.07;
inline constexpr double kOuterRimLogStep = 0.40;   // log(bg / annulus outer value)
inline constexpr double kInnerRampLogSpan = 0.03;  // log fall across the annulus
inline constexpr double kBoreLogDepth = 1.15;      // log(bg / bore value)
inline constexpr double kEdgeSoftnessPx = 0.5;     // half-width of each rim transition

struct IntensityImage {
  int width = 0;
  int height = 0;
  std::vector<float> pixels;

  [[nodiscard]] float at(int x, int y) const { return pixels[std::size_t(y) * width + x]; }
};

namespace sim_detail {

// Radial reflectance profile of one hole, piecewise linear in rho with
// softened rims.
struct RadialProfile {
  double r_mm = 0.0;        // pilot radius
  double R_mm = 0.0;        // countersink radius
  double soft_mm = 0.05;    // rim transition half-width
  double bg = kBgIntensity;
  double annulus_outer = 0.0;
  double annulus_inner = 0.0;
  double bore = 0.0;

  RadialProfile(const HoleSpec& hole, double pixel_pitch_mm) {
    r_mm = hole.pilot_radius_mm;
    R_mm = hole.csk_radius_mm;
    soft_mm = kEdgeSoftnessPx * pixel_pitch_mm;
    annulus_outer = bg * std::exp(-kOuterRimLogStep);
    annulus_inner = bg * std::exp(-(kOuterRimLogStep + kInnerRampLogSpan));
    bore = bg * std::exp(-kBoreLogDepth);
  }

  [[nodiscard]] double ramp(double rho) const {
    return annulus_inner + (annulus_outer - annulus_inner) * (rho - r_mm) / (R_mm - r_mm);
  }

  [[nodiscard]] double value(double rho) const {
    const double w = soft_mm;
    if (rho <= r_mm - w) return bore;
    if (rho < r_mm + w) {
      const double f = (rho - (r_mm - w)) / (2.0 * w);
      return bore + f * (ramp(r_mm + w) - bore);
    }
    if (rho <= R_mm - w) return ramp(rho);
    if (rho < R_mm + w) {
      const double f = (rho - (R_mm - w)) / (2.0 * w);
      return ramp(R_mm - w) + f * (bg - ramp(R_mm - w));
    }
    return bg;
  }
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t kind, std::uint64_t index) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(kind * 0x1000193ull + index)));
}

}  // namespace sim_detail

inline void validate_scene(const SceneSpec& scene) {
  if (scene.cam.width <= 0 || scene.cam.height <= 0 || scene.cam.fx <= 0 || scene.cam.fy <= 0 ||
      scene.cam.z_standoff_mm <= 0) {
    throw Error("camera model has non-positive dimensions");
  }
  for (const auto& h : scene.holes) {
    if (!(h.pilot_radius_mm > 0 && h.pilot_radius_mm < h.csk_radius_mm)) {
      throw Error("hole radii must satisfy 0 < pilot < countersink");
    }
    if (!(h.csk_angle_deg > 0 && h.csk_angle_deg < 180)) {
      throw Error("countersink angle must lie in (0, 180) degrees");
    }
  }
  for (std::size_t i = 0; i < scene.holes.size(); ++i) {
    for (std::size_t j = i + 1; j < scene.holes.size(); ++j) {
      const double dx = scene.holes[i].center_x_mm - scene.holes[j].center_x_mm;
      const double dy = scene.holes[i].center_y_mm - scene.holes[j].center_y_mm;
      const double min_gap = scene.holes[i].csk_radius_mm + scene.holes[j].csk_radius_mm + 1.0;
      if (dx * dx + dy * dy <= min_gap * min_gap) {
        throw Error("holes " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
      }
    }
  }
  const auto& n = scene.noise;
  if (n.background_rate_hz_per_px < 0 || n.edge_jitter_px < 0 || n.timestamp_jitter_ns < 0 ||
      n.reflection_arc_fraction < 0 || n.reflection_arc_fraction >= 1.0) {
    throw Error("noise parameters out of range");
  }
}

// Reference scene appearance with the camera optical axis over
// (cam_x_mm, cam_y_mm) on the workpiece plane.
inline IntensityImage render_intensity(const SceneSpec& scene, double cam_x_mm, double cam_y_mm) {
  validate_scene(scene);
  const CameraModel& cam = scene.cam;
  IntensityImage img;
  img.width = cam.width;
  img.height = cam.height;
  img.pixels.assign(std::size_t(cam.width) * cam.height, float(kBgIntensity));

  const double pitch_x = cam.z_standoff_mm / cam.fx;
  const double pitch_y = cam.z_standoff_mm / cam.fy;
  std::vector<sim_detail::RadialProfile> profiles;
  profiles.reserve(scene.holes.size());
  for (const auto& h : scene.holes) profiles.emplace_back(h, cam.pixel_pitch_mm());

  for (int v = 0; v < cam.height; ++v) {
    const double wy = (v - cam.v0) * pitch_y + cam_y_mm;
    for (int u = 0; u < cam.width; ++u) {
      const double wx = ((u - cam.u0) - cam.skew * (v - cam.v0) / cam.fy) * pitch_x + cam_x_mm;
      double value = kBgIntensity;
      for (std::size_t h = 0; h < scene.holes.size(); ++h) {
        const double dx = wx - scene.holes[h].center_x_mm;
        const double dy = wy - scene.holes[h].center_y_mm;
        const double reach = profiles[h].R_mm + profiles[h].soft_mm;
        if (dx * dx + dy * dy < reach * reach) {
          value = std::min(value, profiles[h].value(std::sqrt(dx * dx + dy * dy)));
        }
      }
      img.pixels[std::size_t(v) * cam.width + u] = float(value);
    }
  }
  return img;
}

namespace sim_detail {

struct RowOutput {
  EventStream events;
  std::vector<std::int64_t> hole_window_counts;  // rim events inside each hole's active window
};

}  // namespace sim_detail

// Contrast-threshold event camera model over the sweep. Per pixel, an event
// of polarity sign(d log I) fires each time the accumulated log-intensity
// change since the last event reaches the contrast threshold; its timestamp
// is interpolated linearly inside the simulation step. Deterministic for a
// fixed seed and any worker count.
inline SimResult generate_events(const SceneSpec& scene, double duration_s, double dt_sim_s) {
  validate_scene(scene);
  const CameraModel& cam = scene.cam;
  const Flow flow = flow_from_twist(scene.twist, cam);  // rejects non-planar twists
  const double max_flow = std::hypot(flow.du, flow.dv);
  if (max_flow > 0.0 && dt_sim_s > 0.5 / max_flow * (1.0 + 1e-12)) {
    throw SubsamplingTooCoarseError("dt_sim " + std::to_string(dt_sim_s) +
                                    " s exceeds half-pixel motion at flow " +
                                    std::to_string(max_flow) + " px/s");
  }

  const double pitch_x = cam.z_standoff_mm / cam.fx;
  const double pitch_y = cam.z_standoff_mm / cam.fy;
  const double vxm = scene.twist.vx * 1000.0;  // mm/s on the workpiece plane
  const double vym = scene.twist.vy * 1000.0;
  const double speed_mm = std::hypot(vxm, vym);
  const double contrast = scene.contrast_threshold;
  const double log_bg = std::log(kBgIntensity);

  // Ground truth: closest approach of each projected hole center to the
  // principal point, measured in pixels.
  SimResult result;
  result.truth.duration_s = duration_s;
  result.truth.speed_mps = scene.twist.linear_speed();
  const double ex = vxm / pitch_x;  // projected center velocity, px/s
  const double ey = vym / pitch_y;
  const double e2 = ex * ex + ey * ey;
  for (std::size_t h = 0; h < scene.holes.size(); ++h) {
    const HoleSpec& hole = scene.holes[h];
    HoleTruth t;
    t.id = int(h);
    t.center_x_mm = hole.center_x_mm;
    t.center_y_mm = hole.center_y_mm;
    t.pilot_radius_mm = hole.pilot_radius_mm;
    t.csk_radius_mm = hole.csk_radius_mm;
    t.csk_angle_deg = hole.csk_angle_deg;
    t.true_depth_mm = hole.true_depth_mm();
    if (e2 > 0.0) {
      // offset of the projected center from the principal point at time t:
      // (fx0 - ex t, fy0 - ey t) with fx0/fy0 the t=0 offsets in pixels
      const double fx0 = hole.center_x_mm / pitch_x;
      const double fy0 = hole.center_y_mm / pitch_y;
      const double tc = (fx0 * ex + fy0 * ey) / e2;
      t.t_center_ns = std::llround(tc * 1e9);
      const double cx = fx0 - ex * tc;
      const double cy = fy0 - ey * tc;
      const double closest2 = cx * cx + cy * cy;
      if (closest2 <= 100.0) {
        const double half = std::sqrt((100.0 - closest2) / e2);
        t.t_enter_ns = std::llround((tc - half) * 1e9);
        t.t_exit_ns = std::llround((tc + half) * 1e9);
      } else {
        t.t_enter_ns = t.t_exit_ns = t.t_center_ns;
      }
      const double cam_x_tc = vxm * tc;
      const double cam_y_tc = vym * tc;
      const double rel_x = hole.center_x_mm - cam_x_tc;
      const double rel_y = hole.center_y_mm - cam_y_tc;
      t.truth_px.center_x = cam.u0 + rel_x / pitch_x + cam.skew * rel_y / cam.z_standoff_mm;
      t.truth_px.center_y = cam.v0 + rel_y / pitch_y;
    } else {
      t.truth_px.center_x = cam.u0 + hole.center_x_mm / pitch_x;
      t.truth_px.center_y = cam.v0 + hole.center_y_mm / pitch_y;
    }
    t.truth_px.inner_radius = hole.pilot_radius_mm / pitch_x;
    t.truth_px.outer_radius = hole.csk_radius_mm / pitch_x;
    result.truth.holes.push_back(t);
  }

  if (max_flow == 0.0 || scene.holes.empty()) {
    // No relative motion: rims shed no events. Background noise still fires.
    if (scene.noise.background_rate_hz_per_px <= 0.0) return result;
  }

  std::vector<sim_detail::RadialProfile> profiles;
  profiles.reserve(scene.holes.size());
  for (const auto& h : scene.holes) profiles.emplace_back(h, cam.pixel_pitch_mm());

  // Holes ordered by the time their interaction can begin.
  std::vector<std::size_t> hole_order(scene.holes.size());
  for (std::size_t i = 0; i < hole_order.size(); ++i) hole_order[i] = i;
  if (speed_mm > 0.0) {
    std::sort(hole_order.begin(), hole_order.end(), [&](std::size_t a, std::size_t b) {
      const double pa = scene.holes[a].center_x_mm * vxm + scene.holes[a].center_y_mm * vym;
      const double pb = scene.holes[b].center_x_mm * vxm + scene.holes[b].center_y_mm * vym;
      return pa < pb;
    });
  }

  // Per-hole window in which bore reflections may appear: projected center
  // within kReflectionActivePx of the principal point.
  constexpr double kReflectionActivePx = 60.0;
  std::vector<std::pair<double, double>> active_window(scene.holes.size(), {0.0, -1.0});
  if (e2 > 0.0) {
    for (std::size_t h = 0; h < scene.holes.size(); ++h) {
      const double tc = double(result.truth.holes[h].t_center_ns) * 1e-9;
      const double half = kReflectionActivePx / std::sqrt(e2);
      active_window[h] = {tc - half, tc + half};
    }
  }

  const int rows = cam.height;
  std::vector<sim_detail::RowOutput> row_out(rows);
  const std::uint64_t seed = scene.noise.seed;
  const double sigma_px = scene.noise.edge_jitter_px;
  const double sigma_ns = scene.noise.timestamp_jitter_ns;
  const double a_coef = vxm * vxm + vym * vym;

  parallel_for(std::size_t(rows), [&](std::size_t row) {
    const int v = int(row);
    sim_detail::RowOutput& out = row_out[row];
    out.hole_window_counts.assign(scene.holes.size(), 0);
    auto rng = sim_detail::stream_rng(seed, 1, row);
    std::normal_distribution<double> gauss(0.0, 1.0);

    auto emit = [&](int u, double t_s, int polarity, std::size_t hole_idx) {
      double px = u, py = v;
      if (sigma_px > 0.0) {
        px += sigma_px * gauss(rng);
        py += sigma_px * gauss(rng);
      }
      std::int64_t t_ns = std::llround(t_s * 1e9);
      if (sigma_ns > 0.0) t_ns += std::llround(sigma_ns * gauss(rng));
      Event e;
      e.x = std::uint16_t(std::clamp(int(std::lround(px)), 0, cam.width - 1));
      e.y = std::uint16_t(std::clamp(int(std::lround(py)), 0, cam.height - 1));
      e.t_ns = std::max<std::int64_t>(0, t_ns);
      e.polarity = std::int8_t(polarity);
      out.events.push_back(e);
      const auto& win = active_window[hole_idx];
      if (t_s >= win.first && t_s <= win.second) ++out.hole_window_counts[hole_idx];
    };

    // Per-pixel trigger state persists across holes within the row.
    std::vector<double> log_ref(cam.width, log_bg);
    std::vector<double> up(cam.width, kBgIntensity * std::exp(contrast));
    std::vector<double> dn(cam.width, kBgIntensity * std::exp(-contrast));
    std::vector<double> prev(cam.width, kBgIntensity);

    if (a_coef > 0.0) {
      for (const std::size_t h : hole_order) {
        const HoleSpec& hole = scene.holes[h];
        const sim_detail::RadialProfile& prof = profiles[h];
        const double margin = prof.soft_mm + 2.0 * cam.pixel_pitch_mm();
        const double reach = prof.R_mm + margin;
        const double reach_hard = prof.R_mm + prof.soft_mm;
        const double bore_hard = prof.r_mm - prof.soft_mm;

        for (int u = 0; u < cam.width; ++u) {
          const double x0 =
              ((u - cam.u0) - cam.skew * (v - cam.v0) / cam.fy) * pitch_x - hole.center_x_mm;
          const double y0 = (v - cam.v0) * pitch_y - hole.center_y_mm;
          const double b_coef = 2.0 * (x0 * vxm + y0 * vym);
          const double c_coef = x0 * x0 + y0 * y0 - reach * reach;
          const double disc = b_coef * b_coef - 4.0 * a_coef * c_coef;
          if (disc <= 0.0) continue;
          const double sq = std::sqrt(disc);
          const double t_in = std::max(0.0, (-b_coef - sq) / (2.0 * a_coef));
          const double t_out = std::min(duration_s, (-b_coef + sq) / (2.0 * a_coef));
          if (t_in >= t_out) continue;
          const std::int64_t k0 = std::int64_t(std::ceil(t_in / dt_sim_s));
          const std::int64_t k1 = std::int64_t(std::floor(t_out / dt_sim_s));
          for (std::int64_t k = k0; k <= k1; ++k) {
            const double t = double(k) * dt_sim_s;
            const double dx = x0 + vxm * t;
            const double dy = y0 + vym * t;
            const double rho2 = dx * dx + dy * dy;
            double cur;
            if (rho2 >= reach_hard * reach_hard) {
              cur = kBgIntensity;
            } else if (rho2 <= bore_hard * bore_hard) {
              cur = prof.bore;
            } else {
              cur = prof.value(std::sqrt(rho2));
            }
            if (cur > dn[u] && cur < up[u]) {
              prev[u] = cur;
              continue;
            }
            const double log_prev = std::log(prev[u]);
            const double log_cur = std::log(cur);
            double ref = log_ref[u];
            const double t_step0 = t - dt_sim_s;
            const double span = log_cur - log_prev;
            while (log_cur - ref >= contrast) {
              const double target = ref + contrast;
              const double frac = span != 0.0 ? (target - log_prev) / span : 1.0;
              emit(u, t_step0 + frac * dt_sim_s, +1, h);
              ref = target;
            }
            while (ref - log_cur >= contrast) {
              const double target = ref - contrast;
              const double frac = span != 0.0 ? (target - log_prev) / span : 1.0;
              emit(u, t_step0 + frac * dt_sim_s, -1, h);
              ref = target;
            }
            log_ref[u] = ref;
            up[u] = std::exp(ref + contrast);
            dn[u] = std::exp(ref - contrast);
            prev[u] = cur;
          }
        }
      }
    }

    // Uniform background activity.
    if (scene.noise.background_rate_hz_per_px > 0.0 && duration_s > 0.0) {
      auto noise_rng = sim_detail::stream_rng(seed, 2, row);
      const double mean = scene.noise.background_rate_hz_per_px * duration_s;
      std::poisson_distribution<int> count_dist(mean);
      std::uniform_real_distribution<double> time_dist(0.0, duration_s);
      for (int u = 0; u < cam.width; ++u) {
        const int n = count_dist(noise_rng);
        for (int i = 0; i < n; ++i) {
          Event e;
          e.x = std::uint16_t(u);
          e.y = std::uint16_t(v);
          e.t_ns = std::max<std::int64_t>(0, std::llround(time_dist(noise_rng) * 1e9));
          e.polarity = (noise_rng() & 1) ? std::int8_t(1) : std::int8_t(-1);
          out.events.push_back(e);
        }
      }
    }
  });

  std::size_t total = 0;
  for (const auto& r : row_out) total += r.events.size();
  result.events.reserve(total + total / 8);
  for (auto& r : row_out) {
    result.events.insert(result.events.end(), r.events.begin(), r.events.end());
  }

  // Bore-wall reflections: a handful of quasi-static glints on an arc inside
  // the pilot bore, active while the hole is near the optical axis. Their
  // volume follows the rim event count so the configured outlier fraction
  // holds per hole.
  if (scene.noise.reflection_arc_fraction > 0.0 && e2 > 0.0) {
    const double f = scene.noise.reflection_arc_fraction;
    for (std::size_t h = 0; h < scene.holes.size(); ++h) {
      std::int64_t rim_count = 0;
      for (const auto& r : row_out) rim_count += r.hole_window_counts[h];
      const auto n_reflect = std::int64_t(std::llround(f / (1.0 - f) * double(rim_count)));
      if (n_reflect <= 0) continue;
      auto rng = sim_detail::stream_rng(seed, 3, h);
      std::normal_distribution<double> gauss(0.0, 1.0);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      const HoleSpec& hole = scene.holes[h];
      const int n_speckles = 3 + int(rng() % 3);
      const double arc_start = unit(rng) * 2.0 * M_PI;
      const double arc_span = (0.8 + 0.8 * unit(rng));  // 45..90 degrees
      std::vector<std::pair<double, double>> speckles;
      for (int s = 0; s < n_speckles; ++s) {
        const double theta = arc_start + unit(rng) * arc_span;
        const double rho = hole.pilot_radius_mm * (0.15 + 0.55 * std::sqrt(unit(rng)));
        speckles.emplace_back(hole.center_x_mm + rho * std::cos(theta),
                              hole.center_y_mm + rho * std::sin(theta));
      }
      const auto& win = active_window[h];
      const double t_lo = std::max(0.0, win.first);
      const double t_hi = std::min(duration_s, win.second);
      if (t_lo >= t_hi) continue;
      std::uniform_real_distribution<double> t_dist(t_lo, t_hi);
      for (std::int64_t i = 0; i < n_reflect; ++i) {
        const double t = t_dist(rng);
        const auto& sp = speckles[std::size_t(rng() % speckles.size())];
        const double rel_x = sp.first - vxm * t;
        const double rel_y = sp.second - vym * t;
        double u = cam.u0 + rel_x / pitch_x + cam.skew * rel_y / cam.z_standoff_mm;
        double v = cam.v0 + rel_y / pitch_y;
        if (sigma_px > 0.0) {
          u += sigma_px * gauss(rng);
          v += sigma_px * gauss(rng);
        }
        if (u < -0.5 || v < -0.5 || u >= cam.width - 0.5 || v >= cam.height - 0.5) continue;
        Event e;
        e.x = std::uint16_t(std::clamp(int(std::lround(u)), 0, cam.width - 1));
        e.y = std::uint16_t(std::clamp(int(std::lround(v)), 0, cam.height - 1));
        std::int64_t t_ns = std::llround(t * 1e9);
        if (sigma_ns > 0.0) t_ns += std::llround(sigma_ns * gauss(rng));
        e.t_ns = std::max<std::int64_t>(0, t_ns);
        e.polarity = (rng() & 1) ? std::int8_t(1) : std::int8_t(-1);
        result.events.push_back(e);
      }
    }
  }

  std::sort(result.events.begin(), result.events.end(), [](const Event& a, const Event& b) {
    if (a.t_ns != b.t_ns) return a.t_ns < b.t_ns;
    if (a.y != b.y) return a.y < b.y;
    if (a.x != b.x) return a.x < b.x;
    return a.polarity < b.polarity;
  });
  return result;
}

// Sweep duration covering the full hole span plus a short lead-out so the
// last hole is still observed around its center crossing.
inline double default_duration_s(const SceneSpec& scene) {
  const double speed = scene.twist.linear_speed();
  if (speed <= 0.0) return 0.0;
  return (scene.workpiece_span_m + 0.006) / speed;
}

// Largest step satisfying the half-pixel inter-frame motion bound, with a
// small safety margin.
inline double default_dt_s(const SceneSpec& scene) {
  const Flow flow = flow_from_twist(scene.twist, scene.cam);
  const double max_flow = std::hypot(flow.du, flow.dv);
  if (max_flow <= 0.0) return std::max(1e-3, default_duration_s(scene));
  return 0.45 / max_flow;
}

inline SimResult simulate(const SceneSpec& scene) {
  return generate_events(scene, default_duration_s(scene), default_dt_s(scene));
}

// Workpiece presets with descending nominal countersink depths. Pilot radii
// follow the 2.0 / 2.5 / 3.0 mm progression; countersink radii vary mildly
// from hole to hole so every hole carries its own depth truth.
inline SceneSpec preset_scene(char id) {
  double pilot = 2.0, csk = 2.95;
  switch (id) {
    case 'A':
    case 'a':
      pilot = 2.0;
      csk = 2.95;
      break;
    case 'B':
    case 'b':
      pilot = 2.5;
      csk = 3.15;
      break;
    case 'C':
    case 'c':
      pilot = 3.0;
      csk = 3.55;
      break;
    default:
      throw Error(std::string("unknown workpiece preset '") + id + "'");
  }
  SceneSpec scene;
  scene.workpiece_span_m = 1.5;
  scene.twist.vx = 0.5;
  const int n_holes = 10;
  const double span_mm = scene.workpiece_span_m * 1000.0;
  for (int i = 0; i < n_holes; ++i) {
    HoleSpec h;
    h.center_x_mm = span_mm * double(i) / double(n_holes - 1);
    h.center_y_mm = 0.0;
    h.pilot_radius_mm = pilot;
    h.csk_radius_mm = csk + 0.03 * double((i % 5) - 2);
    h.csk_angle_deg = 100.0;
    scene.holes.push_back(h);
  }
  return scene;
}

}  // namespace evsink
