#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "evsink/errors.hpp"

namespace evsink {

// Minimum number of events per processing window. Windows are formed by
// event count rather than a fixed time interval so the image of warped
// events stays textured at any sweep speed.
inline constexpr std::size_t kMinWindowEvents = 10000;

// One sensor activation: pixel location, nanosecond timestamp and the sign
// of the log-intensity change that triggered it.
struct Event {
  std::int64_t t_ns = 0;
  std::uint16_t x = 0;
  std::uint16_t y = 0;
  std::int8_t polarity = 1;  // -1 or +1, never 0

  friend bool operator==(const Event&, const Event&) = default;
};

static_assert(sizeof(Event) == 16, "Event must match the 16-byte file record");

// A contiguous, time-ordered slice of an event stream. t_i_ns is the
// reference timestamp all events in the window are warped back to.
struct EventWindow {
  std::vector<Event> events;
  std::int64_t t_i_ns = 0;

  [[nodiscard]] std::size_t count() const noexcept { return events.size(); }
  [[nodiscard]] bool empty() const noexcept { return events.empty(); }
};

inline EventWindow make_window(std::vector<Event> events) {
  EventWindow w;
  w.t_i_ns = events.empty() ? 0 : events.front().t_ns;
  w.events = std::move(events);
  return w;
}

// Pinhole intrinsics plus the standoff depth of the workpiece plane.
struct CameraModel {
  double fx = 1000.0;  // focal length, pixels
  double fy = 1000.0;
  double skew = 0.0;
  double u0 = 320.0;  // principal point, pixels
  double v0 = 240.0;
  int width = 640;
  int height = 480;
  double z_standoff_mm = 90.0;

  [[nodiscard]] double z_standoff_m() const noexcept { return z_standoff_mm * 1e-3; }
  [[nodiscard]] bool contains(int x, int y) const noexcept {
    return x >= 0 && x < width && y >= 0 && y < height;
  }
  // World-plane footprint of one pixel at the standoff depth, mm.
  [[nodiscard]] double pixel_pitch_mm() const noexcept {
    return z_standoff_mm / std::max(fx, fy);
  }
};

// Camera velocity in its own frame: linear m/s, angular rad/s.
struct Twist {
  double vx = 0.0, vy = 0.0, vz = 0.0;
  double wx = 0.0, wy = 0.0, wz = 0.0;

  [[nodiscard]] double linear_speed() const noexcept {
    return std::sqrt(vx * vx + vy * vy + vz * vz);
  }
  [[nodiscard]] bool finite() const noexcept {
    return std::isfinite(vx) && std::isfinite(vy) && std::isfinite(vz) &&
           std::isfinite(wx) && std::isfinite(wy) && std::isfinite(wz);
  }
};

// Concentric-circle geometry of one countersink in the image: inner (pilot
// bore) radius, outer (countersink rim) radius and the shared center.
struct CircleFitParams {
  double inner_radius = 0.0;  // px
  double outer_radius = 0.0;  // px
  double center_x = 0.0;      // px
  double center_y = 0.0;      // px
};

// Metric result for one inspected hole.
struct HoleMeasurement {
  int hole_id = -1;
  double inner_radius_mm = 0.0;
  double outer_radius_mm = 0.0;
  double depth_mm = 0.0;
  double center_u_px = 0.0;
  double center_v_px = 0.0;
};

// A full recording, time ordered.
using EventStream = std::vector<Event>;

// Simulator ground truth for one hole. Positions are workpiece-plane
// millimeters in the frame whose origin sits under the camera at t = 0;
// truth_px is the projected circle geometry at the center-crossing instant.
struct HoleTruth {
  int id = 0;
  double center_x_mm = 0.0;
  double center_y_mm = 0.0;
  double pilot_radius_mm = 0.0;
  double csk_radius_mm = 0.0;
  double csk_angle_deg = 0.0;
  double true_depth_mm = 0.0;
  std::int64_t t_center_ns = 0;  // projection center passes the principal point
  std::int64_t t_enter_ns = 0;   // projection center within 10 px of it
  std::int64_t t_exit_ns = 0;
  CircleFitParams truth_px;
};

// Checks bounds, ordering and the minimum-count contract of a window and
// returns it unchanged. Idempotent by construction.
inline const EventWindow& validate_window(const EventWindow& window, const CameraModel& cam,
                                          std::size_t min_events = kMinWindowEvents) {
  const auto& ev = window.events;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    if (!cam.contains(ev[i].x, ev[i].y)) {
      throw OutOfBoundsError(i, "event " + std::to_string(i) + " at (" + std::to_string(ev[i].x) +
                                    "," + std::to_string(ev[i].y) + ") outside " +
                                    std::to_string(cam.width) + "x" + std::to_string(cam.height));
    }
    if (i > 0 && ev[i].t_ns < ev[i - 1].t_ns) {
      throw UnsortedError(i, "event " + std::to_string(i) + " breaks timestamp order");
    }
  }
  if (ev.size() < min_events) {
    throw TooFewEventsError(ev.size(), "window has " + std::to_string(ev.size()) +
                                           " events, need " + std::to_string(min_events));
  }
  return window;
}

}  // namespace evsink
