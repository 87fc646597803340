#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "evsink/core.hpp"
#include "evsink/errors.hpp"
#include "evsink/inspect.hpp"
#include "evsink/motion_comp.hpp"
#include "evsink/sweep_sim.hpp"

namespace evsink {

// ---------------------------------------------------------------------------
// EVS1 event file: little-endian, fixed 16-byte records for fast scanning.
//   header: magic "EVS1", u16 version=1, u16 width, u16 height,
//           u16 reserved=0, u64 count              (20 bytes)
//   record: i64 t_ns, u16 x, u16 y, i8 polarity, 3 zero pad bytes
// ---------------------------------------------------------------------------

inline constexpr std::size_t kEvs1HeaderBytes = 20;
inline constexpr std::size_t kEvs1RecordBytes = 16;

namespace io_detail {

inline void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(char(v & 0xff));
  out.push_back(char((v >> 8) & 0xff));
}

inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}

inline std::uint16_t get_u16(const unsigned char* p) {
  return std::uint16_t(p[0] | (std::uint16_t(p[1]) << 8));
}

inline std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

inline std::int64_t get_i64(const unsigned char* p) {
  return std::int64_t(get_u64(p));
}

}  // namespace io_detail

inline std::string encode_events(const EventStream& events, std::uint16_t width,
                                 std::uint16_t height) {
  std::string out;
  out.reserve(kEvs1HeaderBytes + events.size() * kEvs1RecordBytes);
  out.append("EVS1", 4);
  io_detail::put_u16(out, 1);  // version
  io_detail::put_u16(out, width);
  io_detail::put_u16(out, height);
  io_detail::put_u16(out, 0);  // reserved
  io_detail::put_u64(out, events.size());
  for (const Event& e : events) {
    io_detail::put_u64(out, std::uint64_t(e.t_ns));
    io_detail::put_u16(out, e.x);
    io_detail::put_u16(out, e.y);
    out.push_back(char(e.polarity));
    out.append(3, '\0');
  }
  return out;
}

struct Evs1File {
  std::uint16_t width = 0;
  std::uint16_t height = 0;
  EventStream events;
};

inline Evs1File decode_events(const std::string& bytes) {
  if (bytes.size() < kEvs1HeaderBytes) {
    throw TruncatedFileError("file shorter than the " + std::to_string(kEvs1HeaderBytes) +
                             "-byte header");
  }
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (std::memcmp(p, "EVS1", 4) != 0) {
    throw BadMagicError("missing EVS1 magic at offset 0");
  }
  const std::uint16_t version = io_detail::get_u16(p + 4);
  if (version != 1) {
    throw BadMagicError("unsupported EVS1 version " + std::to_string(version));
  }
  Evs1File file;
  file.width = io_detail::get_u16(p + 6);
  file.height = io_detail::get_u16(p + 8);
  const std::uint64_t count = io_detail::get_u64(p + 12);
  const std::uint64_t payload = bytes.size() - kEvs1HeaderBytes;
  if (payload < count * kEvs1RecordBytes) {
    throw TruncatedFileError("header announces " + std::to_string(count) + " records but only " +
                             std::to_string(payload / kEvs1RecordBytes) + " are present");
  }
  if (payload != count * kEvs1RecordBytes) {
    throw CountMismatchError("file holds " + std::to_string(payload / kEvs1RecordBytes) +
                             " records, header says " + std::to_string(count));
  }
  file.events.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::size_t off = kEvs1HeaderBytes + i * kEvs1RecordBytes;
    const unsigned char* rec = p + off;
    Event e;
    e.t_ns = io_detail::get_i64(rec);
    e.x = io_detail::get_u16(rec + 8);
    e.y = io_detail::get_u16(rec + 10);
    const auto pol = std::int8_t(rec[12]);
    if (pol != 1 && pol != -1) {
      throw BadPolarityError(off + 12, "polarity byte " + std::to_string(int(pol)) +
                                           " at file offset " + std::to_string(off + 12));
    }
    e.polarity = pol;
    if (e.x >= file.width || e.y >= file.height) {
      throw OutOfBoundsError(i, "record " + std::to_string(i) + " at (" + std::to_string(e.x) +
                                    "," + std::to_string(e.y) + ") outside header bounds");
    }
    file.events.push_back(e);
  }
  return file;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out.write(bytes.data(), std::streamsize(bytes.size()));
  if (!out) throw Error("short write to " + path);
}

inline void write_events(const std::string& path, const EventStream& events, std::uint16_t width,
                         std::uint16_t height) {
  write_file(path, encode_events(events, width, height));
}

inline Evs1File read_events(const std::string& path) { return decode_events(read_file(path)); }

// ---------------------------------------------------------------------------
// Scene / camera configuration: line-oriented key = value text with units in
// the key names, '#' starts a comment.
// ---------------------------------------------------------------------------

namespace io_detail {

inline std::string fmt(double v) {
  std::ostringstream ss;
  ss << std::setprecision(17) << v;
  return ss.str();
}

struct KeyValue {
  std::string key;
  std::string value;
};

inline std::vector<KeyValue> parse_lines(const std::string& text) {
  std::vector<KeyValue> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      bool blank = true;
      for (const char c : line) {
        if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
      }
      if (blank) continue;
      throw ParseError("line " + std::to_string(lineno) + ": expected key = value");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    out.push_back({trim(line.substr(0, eq)), trim(line.substr(eq + 1))});
  }
  return out;
}

inline double to_double(const KeyValue& kv) {
  std::size_t used = 0;
  const double v = std::stod(kv.value, &used);
  while (used < kv.value.size() && std::isspace(static_cast<unsigned char>(kv.value[used]))) {
    ++used;
  }
  if (used != kv.value.size()) throw ParseError("key " + kv.key + ": bad number " + kv.value);
  return v;
}

}  // namespace io_detail

inline std::string serialize_scene(const SceneSpec& scene) {
  std::ostringstream out;
  using io_detail::fmt;
  out << "# countersink sweep scene\n";
  out << "sensor_width_px = " << scene.cam.width << "\n";
  out << "sensor_height_px = " << scene.cam.height << "\n";
  out << "focal_x_px = " << fmt(scene.cam.fx) << "\n";
  out << "focal_y_px = " << fmt(scene.cam.fy) << "\n";
  out << "skew_px = " << fmt(scene.cam.skew) << "\n";
  out << "principal_u_px = " << fmt(scene.cam.u0) << "\n";
  out << "principal_v_px = " << fmt(scene.cam.v0) << "\n";
  out << "z_standoff_mm = " << fmt(scene.cam.z_standoff_mm) << "\n";
  out << "workpiece_span_m = " << fmt(scene.workpiece_span_m) << "\n";
  out << "twist_vx_mps = " << fmt(scene.twist.vx) << "\n";
  out << "twist_vy_mps = " << fmt(scene.twist.vy) << "\n";
  out << "contrast_threshold = " << fmt(scene.contrast_threshold) << "\n";
  out << "noise_background_rate_hz_per_px = " << fmt(scene.noise.background_rate_hz_per_px)
      << "\n";
  out << "noise_edge_jitter_px = " << fmt(scene.noise.edge_jitter_px) << "\n";
  out << "noise_reflection_arc_fraction = " << fmt(scene.noise.reflection_arc_fraction) << "\n";
  out << "noise_timestamp_jitter_ns = " << fmt(scene.noise.timestamp_jitter_ns) << "\n";
  out << "noise_seed = " << scene.noise.seed << "\n";
  for (const auto& h : scene.holes) {
    out << "hole = " << fmt(h.center_x_mm) << " " << fmt(h.center_y_mm) << " "
        << fmt(h.pilot_radius_mm) << " " << fmt(h.csk_radius_mm) << " " << fmt(h.csk_angle_deg)
        << "\n";
  }
  return out.str();
}

inline SceneSpec parse_scene(const std::string& text) {
  SceneSpec scene;
  scene.holes.clear();
  for (const auto& kv : io_detail::parse_lines(text)) {
    if (kv.key == "hole") {
      std::istringstream ss(kv.value);
      HoleSpec h;
      if (!(ss >> h.center_x_mm >> h.center_y_mm >> h.pilot_radius_mm >> h.csk_radius_mm >>
            h.csk_angle_deg)) {
        throw ParseError("hole line needs 5 numbers: " + kv.value);
      }
      scene.holes.push_back(h);
    } else if (kv.key == "sensor_width_px") {
      scene.cam.width = int(io_detail::to_double(kv));
    } else if (kv.key == "sensor_height_px") {
      scene.cam.height = int(io_detail::to_double(kv));
    } else if (kv.key == "focal_x_px") {
      scene.cam.fx = io_detail::to_double(kv);
    } else if (kv.key == "focal_y_px") {
      scene.cam.fy = io_detail::to_double(kv);
    } else if (kv.key == "skew_px") {
      scene.cam.skew = io_detail::to_double(kv);
    } else if (kv.key == "principal_u_px") {
      scene.cam.u0 = io_detail::to_double(kv);
    } else if (kv.key == "principal_v_px") {
      scene.cam.v0 = io_detail::to_double(kv);
    } else if (kv.key == "z_standoff_mm") {
      scene.cam.z_standoff_mm = io_detail::to_double(kv);
    } else if (kv.key == "workpiece_span_m") {
      scene.workpiece_span_m = io_detail::to_double(kv);
    } else if (kv.key == "twist_vx_mps") {
      scene.twist.vx = io_detail::to_double(kv);
    } else if (kv.key == "twist_vy_mps") {
      scene.twist.vy = io_detail::to_double(kv);
    } else if (kv.key == "contrast_threshold") {
      scene.contrast_threshold = io_detail::to_double(kv);
    } else if (kv.key == "noise_background_rate_hz_per_px") {
      scene.noise.background_rate_hz_per_px = io_detail::to_double(kv);
    } else if (kv.key == "noise_edge_jitter_px") {
      scene.noise.edge_jitter_px = io_detail::to_double(kv);
    } else if (kv.key == "noise_reflection_arc_fraction") {
      scene.noise.reflection_arc_fraction = io_detail::to_double(kv);
    } else if (kv.key == "noise_timestamp_jitter_ns") {
      scene.noise.timestamp_jitter_ns = io_detail::to_double(kv);
    } else if (kv.key == "noise_seed") {
      scene.noise.seed = std::uint64_t(io_detail::to_double(kv));
    } else {
      throw ParseError("unknown scene key: " + kv.key);
    }
  }
  return scene;
}

// Accepts a full scene file as well; non-camera keys are ignored.
inline CameraModel parse_camera(const std::string& text) {
  CameraModel cam;
  for (const auto& kv : io_detail::parse_lines(text)) {
    if (kv.key == "sensor_width_px") {
      cam.width = int(io_detail::to_double(kv));
    } else if (kv.key == "sensor_height_px") {
      cam.height = int(io_detail::to_double(kv));
    } else if (kv.key == "focal_x_px") {
      cam.fx = io_detail::to_double(kv);
    } else if (kv.key == "focal_y_px") {
      cam.fy = io_detail::to_double(kv);
    } else if (kv.key == "skew_px") {
      cam.skew = io_detail::to_double(kv);
    } else if (kv.key == "principal_u_px") {
      cam.u0 = io_detail::to_double(kv);
    } else if (kv.key == "principal_v_px") {
      cam.v0 = io_detail::to_double(kv);
    } else if (kv.key == "z_standoff_mm") {
      cam.z_standoff_mm = io_detail::to_double(kv);
    }
  }
  return cam;
}

// ---------------------------------------------------------------------------
// Ground-truth manifest.
// ---------------------------------------------------------------------------

inline std::string serialize_manifest(const GroundTruth& truth) {
  std::ostringstream out;
  using io_detail::fmt;
  out << "# sweep ground truth\n";
  out << "duration_s = " << fmt(truth.duration_s) << "\n";
  out << "speed_mps = " << fmt(truth.speed_mps) << "\n";
  for (const auto& h : truth.holes) {
    out << "hole = " << h.id << " " << fmt(h.center_x_mm) << " " << fmt(h.center_y_mm) << " "
        << fmt(h.pilot_radius_mm) << " " << fmt(h.csk_radius_mm) << " " << fmt(h.csk_angle_deg)
        << " " << fmt(h.true_depth_mm) << " " << h.t_center_ns << " "
        << fmt(h.truth_px.inner_radius) << " " << fmt(h.truth_px.outer_radius) << " "
        << fmt(h.truth_px.center_x) << " " << fmt(h.truth_px.center_y) << "\n";
  }
  return out.str();
}

inline GroundTruth parse_manifest(const std::string& text) {
  GroundTruth truth;
  for (const auto& kv : io_detail::parse_lines(text)) {
    if (kv.key == "duration_s") {
      truth.duration_s = io_detail::to_double(kv);
    } else if (kv.key == "speed_mps") {
      truth.speed_mps = io_detail::to_double(kv);
    } else if (kv.key == "hole") {
      std::istringstream ss(kv.value);
      HoleTruth h;
      if (!(ss >> h.id >> h.center_x_mm >> h.center_y_mm >> h.pilot_radius_mm >>
            h.csk_radius_mm >> h.csk_angle_deg >> h.true_depth_mm >> h.t_center_ns >>
            h.truth_px.inner_radius >> h.truth_px.outer_radius >> h.truth_px.center_x >>
            h.truth_px.center_y)) {
        throw ParseError("hole line needs 12 fields: " + kv.value);
      }
      h.t_enter_ns = h.t_exit_ns = h.t_center_ns;
      truth.holes.push_back(h);
    } else {
      throw ParseError("unknown manifest key: " + kv.key);
    }
  }
  return truth;
}

// ---------------------------------------------------------------------------
// Report CSV and IWE image output.
// ---------------------------------------------------------------------------

inline std::string measurements_csv(const std::vector<InspectionReport>& reports) {
  std::ostringstream out;
  out << "hole_id,speed_mps,trial,r_mm,R_mm,depth_mm,center_u,center_v\n";
  for (const auto& rep : reports) {
    for (const auto& h : rep.per_hole) {
      out << h.hole_id << "," << rep.speed_mps << "," << rep.trial << "," << std::setprecision(9)
          << h.inner_radius_mm << "," << h.outer_radius_mm << "," << h.depth_mm << ","
          << h.center_u_px << "," << h.center_v_px << "\n";
    }
  }
  return out.str();
}

// 16-bit binary PGM; signed polarity sums are offset by +32768.
inline std::string encode_iwe_pgm(const Iwe& iwe) {
  std::ostringstream head;
  head << "P5\n" << iwe.width << " " << iwe.height << "\n65535\n";
  std::string out = head.str();
  out.reserve(out.size() + iwe.grid.size() * 2);
  for (const std::int32_t v : iwe.grid) {
    const std::int32_t shifted = std::clamp(v + 32768, 0, 65535);
    out.push_back(char((shifted >> 8) & 0xff));  // most significant byte first
    out.push_back(char(shifted & 0xff));
  }
  return out;
}

inline void write_iwe_pgm(const std::string& path, const Iwe& iwe) {
  write_file(path, encode_iwe_pgm(iwe));
}

}  // namespace evsink
