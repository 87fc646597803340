#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <unordered_map>
#include <utility>
#include <vector>

#include "evsink/core.hpp"
#include "evsink/errors.hpp"
#include "evsink/motion_comp.hpp"

namespace evsink {

// One mode of the activated-pixel density and the points that converged to it.
struct Cluster {
  int id = 0;
  double centroid_x = 0.0;
  double centroid_y = 0.0;
  std::vector<std::pair<double, double>> members;  // pixel coordinates
};

struct MeanShiftConfig {
  double bandwidth = 25.0;        // flat-kernel radius, px
  double convergence_px = 1e-3;   // stop when a shift is smaller than this
  int max_iterations = 300;
  double merge_radius_factor = 0.5;  // modes within factor*bandwidth collapse
};

namespace detail {

// Uniform-grid index over fixed data points, cell size = bandwidth.
class PointGrid {
 public:
  PointGrid(const std::vector<std::pair<double, double>>& pts, double cell) : cell_(cell) {
    double min_x = 0.0, min_y = 0.0;
    if (!pts.empty()) {
      min_x = pts[0].first;
      min_y = pts[0].second;
      for (const auto& p : pts) {
        min_x = std::min(min_x, p.first);
        min_y = std::min(min_y, p.second);
      }
    }
    ox_ = min_x;
    oy_ = min_y;
    nx_ = 1;
    ny_ = 1;
    for (const auto& p : pts) {
      nx_ = std::max(nx_, cell_index(p.first, ox_) + 1);
      ny_ = std::max(ny_, cell_index(p.second, oy_) + 1);
    }
    std::vector<int> counts(std::size_t(nx_) * ny_ + 1, 0);
    for (const auto& p : pts) ++counts[cell_of(p) + 1];
    for (std::size_t i = 1; i < counts.size(); ++i) counts[i] += counts[i - 1];
    offsets_ = counts;
    xs_.resize(pts.size());
    ys_.resize(pts.size());
    std::vector<int> cursor(offsets_.begin(), offsets_.end() - 1);
    for (const auto& p : pts) {
      const int slot = cursor[cell_of(p)]++;
      xs_[slot] = p.first;
      ys_[slot] = p.second;
    }
  }

  // Mean of all data points within `radius` of (qx, qy), inclusive.
  // Returns false when the neighborhood is empty.
  bool neighborhood_mean(double qx, double qy, double radius, double* mx, double* my) const {
    const double r2 = radius * radius;
    const int cx = cell_index(qx, ox_);
    const int cy = cell_index(qy, oy_);
    double sx = 0.0, sy = 0.0;
    int n = 0;
    for (int gy = std::max(0, cy - 1); gy <= std::min(ny_ - 1, cy + 1); ++gy) {
      for (int gx = std::max(0, cx - 1); gx <= std::min(nx_ - 1, cx + 1); ++gx) {
        const std::size_t cell = std::size_t(gy) * nx_ + gx;
        const int begin = offsets_[cell];
        const int end = offsets_[cell + 1];
        for (int i = begin; i < end; ++i) {
          const double dx = xs_[i] - qx;
          const double dy = ys_[i] - qy;
          if (dx * dx + dy * dy <= r2) {
            sx += xs_[i];
            sy += ys_[i];
            ++n;
          }
        }
      }
    }
    if (n == 0) return false;
    *mx = sx / n;
    *my = sy / n;
    return true;
  }

 private:
  int cell_index(double v, double origin) const {
    const int i = int(std::floor((v - origin) / cell_));
    return std::max(0, i);
  }
  std::size_t cell_of(const std::pair<double, double>& p) const {
    const int cx = std::min(nx_ - 1, cell_index(p.first, ox_));
    const int cy = std::min(ny_ - 1, cell_index(p.second, oy_));
    return std::size_t(cy) * nx_ + cx;
  }

  double cell_ = 1.0;
  double ox_ = 0.0, oy_ = 0.0;
  int nx_ = 1, ny_ = 1;
  std::vector<int> offsets_;
  std::vector<double> xs_, ys_;
};

struct PosKey {
  std::uint64_t x_bits, y_bits;
  bool operator==(const PosKey&) const = default;
};

struct PosKeyHash {
  std::size_t operator()(const PosKey& k) const noexcept {
    std::uint64_t h = k.x_bits * 0x9e3779b97f4a7c15ull;
    h ^= k.y_bits + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return std::size_t(h);
  }
};

inline PosKey pos_key(double x, double y) {
  PosKey k;
  static_assert(sizeof(double) == sizeof(std::uint64_t));
  std::memcpy(&k.x_bits, &x, 8);
  std::memcpy(&k.y_bits, &y, 8);
  return k;
}

}  // namespace detail

// Exact flat-kernel mean-shift: every point seeds its own iteration, modes
// closer than merge_radius collapse into one cluster, and every point joins
// the cluster its seed converged to. Seeds are processed in the input
// (row-major) order, which fixes cluster ids and tie-breaks.
inline std::vector<Cluster> mean_shift(const SaePoints& points, double bandwidth,
                                       const MeanShiftConfig& config_in = {}) {
  if (points.empty()) {
    throw EmptyInputError("mean_shift needs at least one point");
  }
  MeanShiftConfig config = config_in;
  config.bandwidth = bandwidth;

  std::vector<std::pair<double, double>> pts;
  pts.reserve(points.size());
  for (const auto& [x, y] : points.points) pts.emplace_back(double(x), double(y));

  const detail::PointGrid grid(pts, bandwidth);
  const double merge_radius = config.merge_radius_factor * bandwidth;
  const double merge_r2 = merge_radius * merge_radius;
  const double conv2 = config.convergence_px * config.convergence_px;

  std::vector<std::pair<double, double>> cluster_reps;  // first mode per cluster
  std::vector<Cluster> clusters;
  std::vector<int> assignment(pts.size(), -1);
  // Visited positions -> cluster id. Iteration paths that touch a known
  // position share its destination, which collapses the per-seed cost on
  // dense inputs.
  std::unordered_map<detail::PosKey, int, detail::PosKeyHash> memo;
  std::vector<std::pair<double, double>> path;

  for (std::size_t s = 0; s < pts.size(); ++s) {
    double x = pts[s].first;
    double y = pts[s].second;
    int resolved = -1;
    path.clear();
    for (int it = 0; it < config.max_iterations; ++it) {
      const auto key = detail::pos_key(x, y);
      if (auto hit = memo.find(key); hit != memo.end()) {
        resolved = hit->second;
        break;
      }
      path.emplace_back(x, y);
      double mx = 0.0, my = 0.0;
      // A seed is always inside its own neighborhood; an empty one can only
      // appear after a jump landed in a void, in which case the current
      // position is the mode.
      if (!grid.neighborhood_mean(x, y, bandwidth, &mx, &my)) break;
      const double dx = mx - x;
      const double dy = my - y;
      x = mx;
      y = my;
      if (dx * dx + dy * dy < conv2) break;
    }
    if (resolved < 0) {
      // Converged to a fresh mode; merge with an existing cluster if close.
      for (std::size_t c = 0; c < cluster_reps.size(); ++c) {
        const double dx = cluster_reps[c].first - x;
        const double dy = cluster_reps[c].second - y;
        if (dx * dx + dy * dy <= merge_r2) {
          resolved = int(c);
          break;
        }
      }
      if (resolved < 0) {
        resolved = int(cluster_reps.size());
        cluster_reps.emplace_back(x, y);
        Cluster cl;
        cl.id = resolved;
        clusters.push_back(std::move(cl));
      }
      memo.emplace(detail::pos_key(x, y), resolved);
    }
    for (const auto& p : path) memo.emplace(detail::pos_key(p.first, p.second), resolved);
    assignment[s] = resolved;
  }

  for (std::size_t s = 0; s < pts.size(); ++s) {
    clusters[assignment[s]].members.push_back(pts[s]);
  }
  for (auto& cl : clusters) {
    double sx = 0.0, sy = 0.0;
    for (const auto& m : cl.members) {
      sx += m.first;
      sy += m.second;
    }
    cl.centroid_x = sx / double(cl.members.size());
    cl.centroid_y = sy / double(cl.members.size());
  }
  return clusters;
}

// The cluster whose centroid lies nearest the principal point; ties go to
// the lower cluster id.
inline const Cluster& select_inspection_cluster(const std::vector<Cluster>& clusters,
                                                const CameraModel& cam) {
  if (clusters.empty()) {
    throw EmptyInputError("no clusters to select from");
  }
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    const double dx = clusters[i].centroid_x - cam.u0;
    const double dy = clusters[i].centroid_y - cam.v0;
    const double d2 = dx * dx + dy * dy;
    if (d2 < best_d2 || (d2 == best_d2 && clusters[i].id < clusters[best].id)) {
      best_d2 = d2;
      best = i;
    }
  }
  return clusters[best];
}

// Multi-hole variant for nut-plate style patterns: all clusters whose
// centroid falls within `radius_px` of the principal point, nearest first.
inline std::vector<std::size_t> select_inspection_clusters(const std::vector<Cluster>& clusters,
                                                           const CameraModel& cam,
                                                           double radius_px) {
  std::vector<std::size_t> picked;
  std::vector<double> dist;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    const double dx = clusters[i].centroid_x - cam.u0;
    const double dy = clusters[i].centroid_y - cam.v0;
    const double d = std::sqrt(dx * dx + dy * dy);
    if (d <= radius_px) {
      picked.push_back(i);
      dist.push_back(d);
    }
  }
  std::vector<std::size_t> order(picked.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
  std::vector<std::size_t> out;
  out.reserve(order.size());
  for (const auto i : order) out.push_back(picked[i]);
  return out;
}

}  // namespace evsink
