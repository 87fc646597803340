#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <utility>
#include <vector>

#include "evsink/core.hpp"
#include "evsink/errors.hpp"

namespace evsink {

// Image-plane velocity of scene features, px/s.
struct Flow {
  double du = 0.0;
  double dv = 0.0;
};

// Image of warped events: per-pixel signed polarity sums after warping every
// event of a window back to the reference time t_i_ns.
struct Iwe {
  std::vector<std::int32_t> grid;  // row-major width*height
  int width = 0;
  int height = 0;
  std::int64_t t_i_ns = 0;
  Flow flow;
  std::size_t dropped = 0;  // events warped outside the sensor
  // bounding box of touched pixels; x0 > x1 when the grid is empty
  int x0 = 0, y0 = 0, x1 = -1, y1 = -1;

  [[nodiscard]] std::int32_t at(int x, int y) const { return grid[std::size_t(y) * width + x]; }

  [[nodiscard]] double variance() const {
    if (grid.empty()) return 0.0;
    double mean = 0.0;
    for (const auto v : grid) mean += v;
    mean /= double(grid.size());
    double acc = 0.0;
    for (const auto v : grid) {
      const double d = double(v) - mean;
      acc += d * d;
    }
    return acc / double(grid.size());
  }
};

// Activated pixels surviving morphological denoising, row-major (y,x) order.
struct SaePoints {
  std::vector<std::pair<std::uint16_t, std::uint16_t>> points;  // (x, y)

  [[nodiscard]] std::size_t size() const noexcept { return points.size(); }
  [[nodiscard]] bool empty() const noexcept { return points.empty(); }
};

// Closed-form image flow for a purely translational, fronto-parallel sweep.
// The full 2x6 interaction matrix collapses to its first two columns when
// vz and the angular rates vanish.
inline Flow flow_from_twist(const Twist& twist, const CameraModel& cam) {
  constexpr double kPlanarTol = 1e-9;
  if (std::abs(twist.vz) > kPlanarTol || std::abs(twist.wx) > kPlanarTol ||
      std::abs(twist.wy) > kPlanarTol || std::abs(twist.wz) > kPlanarTol) {
    throw NonPlanarTwistError("sweep twist must be planar (vz = angular rates = 0)");
  }
  const double z_m = cam.z_standoff_m();
  return Flow{-cam.fx / z_m * twist.vx, -cam.fy / z_m * twist.vy};
}

// Rounds half away from zero, matching llround.
inline int round_px(double v) { return int(std::llround(v)); }

// Shifts each event against the flow to the window's reference time and
// accumulates signed polarities. Warps landing outside the sensor are
// dropped and counted.
inline Iwe warp_events(const EventWindow& window, Flow flow, const CameraModel& cam) {
  Iwe iwe;
  iwe.width = cam.width;
  iwe.height = cam.height;
  iwe.t_i_ns = window.t_i_ns;
  iwe.flow = flow;
  iwe.grid.assign(std::size_t(cam.width) * cam.height, 0);
  iwe.x0 = cam.width;
  iwe.y0 = cam.height;
  iwe.x1 = -1;
  iwe.y1 = -1;
  for (const Event& e : window.events) {
    const double dt_s = double(e.t_ns - window.t_i_ns) * 1e-9;
    const int x = round_px(double(e.x) - flow.du * dt_s);
    const int y = round_px(double(e.y) - flow.dv * dt_s);
    if (!cam.contains(x, y)) {
      ++iwe.dropped;
      continue;
    }
    iwe.grid[std::size_t(y) * cam.width + x] += e.polarity;
    iwe.x0 = std::min(iwe.x0, x);
    iwe.y0 = std::min(iwe.y0, y);
    iwe.x1 = std::max(iwe.x1, x);
    iwe.y1 = std::max(iwe.y1, y);
  }
  return iwe;
}

namespace detail {

// Binary erosion/dilation with a square structuring element of side
// 2*radius+1. Out-of-image pixels count as inactive.
inline std::vector<std::uint8_t> erode(const std::vector<std::uint8_t>& mask, int w, int h,
                                       int radius) {
  std::vector<std::uint8_t> out(mask.size(), 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      bool keep = true;
      for (int dy = -radius; keep && dy <= radius; ++dy) {
        const int yy = y + dy;
        if (yy < 0 || yy >= h) {
          keep = false;
          break;
        }
        for (int dx = -radius; dx <= radius; ++dx) {
          const int xx = x + dx;
          if (xx < 0 || xx >= w || !mask[std::size_t(yy) * w + xx]) {
            keep = false;
            break;
          }
        }
      }
      out[std::size_t(y) * w + x] = keep ? 1 : 0;
    }
  }
  return out;
}

inline std::vector<std::uint8_t> dilate(const std::vector<std::uint8_t>& mask, int w, int h,
                                        int radius) {
  std::vector<std::uint8_t> out(mask.size(), 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask[std::size_t(y) * w + x]) continue;
      for (int dy = -radius; dy <= radius; ++dy) {
        const int yy = y + dy;
        if (yy < 0 || yy >= h) continue;
        for (int dx = -radius; dx <= radius; ++dx) {
          const int xx = x + dx;
          if (xx >= 0 && xx < w) out[std::size_t(yy) * w + xx] = 1;
        }
      }
    }
  }
  return out;
}

}  // namespace detail

// Binarizes |polarity sum| >= activation_threshold, applies an opening
// (erosion then dilation) with a square element, and returns the surviving
// pixel coordinates in row-major order.
inline SaePoints extract_sae(const Iwe& iwe, std::int32_t activation_threshold = 1,
                             int opening_radius = 1) {
  SaePoints sae;
  if (iwe.x1 < iwe.x0 || iwe.y1 < iwe.y0) return sae;

  // Work on the touched bounding box, padded so border erosion matches the
  // full-frame result.
  const int pad = opening_radius;
  const int bx0 = std::max(0, iwe.x0 - pad);
  const int by0 = std::max(0, iwe.y0 - pad);
  const int bx1 = std::min(iwe.width - 1, iwe.x1 + pad);
  const int by1 = std::min(iwe.height - 1, iwe.y1 + pad);
  const int bw = bx1 - bx0 + 1;
  const int bh = by1 - by0 + 1;

  std::vector<std::uint8_t> mask(std::size_t(bw) * bh, 0);
  for (int y = by0; y <= by1; ++y) {
    const std::size_t row = std::size_t(y) * iwe.width;
    for (int x = bx0; x <= bx1; ++x) {
      if (std::abs(iwe.grid[row + x]) >= activation_threshold) {
        mask[std::size_t(y - by0) * bw + (x - bx0)] = 1;
      }
    }
  }
  // Pixels on the true sensor border erode against the outside; pixels on
  // the crop border must not unless they coincide with the sensor border.
  // The pad above guarantees active pixels are >= radius away from the crop
  // edge except where the crop edge is the sensor edge, so the cropped
  // opening equals the full-frame opening.
  std::vector<std::uint8_t> opened = detail::dilate(detail::erode(mask, bw, bh, opening_radius),
                                                    bw, bh, opening_radius);
  for (int y = 0; y < bh; ++y) {
    for (int x = 0; x < bw; ++x) {
      if (opened[std::size_t(y) * bw + x]) {
        sae.points.emplace_back(std::uint16_t(x + bx0), std::uint16_t(y + by0));
      }
    }
  }
  return sae;
}

}  // namespace evsink
