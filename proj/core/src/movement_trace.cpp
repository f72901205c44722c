#include "mobinfer/movement_trace.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

#include "mobinfer/num_format.hpp"

namespace mobinfer {

MovementTrace::MovementTrace(int node_count, double dt, Geometry geometry,
                             std::vector<Vec2> positions)
    : node_count_(node_count), dt_(dt), geometry_(geometry) {
  if (node_count_ <= 0) throw ValidationError("node_count must be positive");
  if (!(dt_ > 0.0)) throw ValidationError("dt must be positive");
  if (positions.empty() || positions.size() % node_count_ != 0) {
    throw ValidationError(
        "position array must be a non-empty multiple of node_count");
  }
  if (geometry_.is_torus()) {
    for (Vec2& p : positions) p = geometry_.canonical(p);
  }
  for (const Vec2& p : positions) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw ValidationError("non-finite coordinate in movement trace");
    }
  }
  positions_ = std::move(positions);
}

std::span<const Vec2> MovementTrace::frame(int k) const {
  if (k < 0 || k >= frame_count()) {
    throw std::domain_error("frame index " + std::to_string(k) +
                            " outside [0, " + std::to_string(frame_count()) +
                            ")");
  }
  return {positions_.data() + static_cast<std::size_t>(k) * node_count_,
          static_cast<std::size_t>(node_count_)};
}

int MovementTrace::frame_index_at(double t) const {
  if (!(t >= 0.0 && t <= duration())) {
    throw std::domain_error("time " + format_double(t) +
                            " outside trace duration [0, " +
                            format_double(duration()) + "]");
  }
  return static_cast<int>(std::llround(t / dt_));
}

std::span<const Vec2> MovementTrace::positions_at(double t) const {
  return frame(frame_index_at(t));
}

std::vector<SpeedViolation> max_speed_violations(const MovementTrace& trace,
                                                 double v_max) {
  if (trace.frame_count() < 2) {
    throw std::domain_error("max_speed_violations needs at least 2 frames");
  }
  constexpr double kSlack = 1e-9;  // absolute, in meters
  const double limit = v_max * trace.dt() + kSlack;
  std::vector<SpeedViolation> out;
  for (int k = 0; k + 1 < trace.frame_count(); ++k) {
    auto cur = trace.frame(k);
    auto nxt = trace.frame(k + 1);
    for (NodeId i = 0; i < trace.node_count(); ++i) {
      if (trace.geometry().distance(cur[i], nxt[i]) > limit) {
        out.push_back({i, k});
      }
    }
  }
  return out;
}

MovementTrace resample(const MovementTrace& trace, double target_dt) {
  if (!(target_dt > 0.0)) throw ConfigError("target dt must be positive");
  const double ratio = target_dt / trace.dt();
  const long stride = std::lround(ratio);
  if (stride < 1 || std::abs(ratio - static_cast<double>(stride)) > 1e-9) {
    throw ConfigError("target dt " + format_double(target_dt) +
                      " is not an integer multiple of trace dt " +
                      format_double(trace.dt()));
  }
  if (stride == 1) return trace;
  std::vector<Vec2> positions;
  const int frames = (trace.frame_count() - 1) / static_cast<int>(stride) + 1;
  positions.reserve(static_cast<std::size_t>(frames) * trace.node_count());
  for (int k = 0; k < frames; ++k) {
    auto f = trace.frame(k * static_cast<int>(stride));
    positions.insert(positions.end(), f.begin(), f.end());
  }
  return MovementTrace(trace.node_count(), target_dt, trace.geometry(),
                       std::move(positions));
}

namespace {

constexpr const char* kMovementHeader = "t,node_id,x,y";

std::string_view strip_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    std::size_t next = line.find(sep, pos);
    if (next == std::string_view::npos) {
      fields.push_back(line.substr(pos));
      break;
    }
    fields.push_back(line.substr(pos, next - pos));
    pos = next + 1;
  }
  return fields;
}

std::string_view expect_key(std::string_view field, std::string_view key,
                            long lineno) {
  if (field.substr(0, key.size()) != key) {
    throw ParseError("expected '" + std::string(key) + "...' in preamble",
                     lineno);
  }
  return field.substr(key.size());
}

}  // namespace

MovementTrace load_movement_trace(std::istream& in) {
  std::string line;
  long lineno = 0;

  if (!std::getline(in, line)) throw ParseError("empty movement trace file");
  ++lineno;
  std::string_view pre = strip_cr(line);
  if (pre.substr(0, 2) != "# ") {
    throw ParseError("movement trace must start with a '# geometry=...' line",
                     lineno);
  }
  pre.remove_prefix(2);
  auto fields = split_fields(pre, ',');

  Geometry geometry;
  std::size_t idx = 0;
  std::string_view kind = expect_key(fields[idx++], "geometry=", lineno);
  if (kind == "torus") {
    if (fields.size() != 5) {
      throw ParseError("torus preamble needs geometry=torus,w,h,dt=...,n=...",
                       lineno);
    }
    double w = parse_double(fields[idx++], lineno);
    double h = parse_double(fields[idx++], lineno);
    geometry = Geometry::torus(w, h);
  } else if (kind == "plane") {
    if (fields.size() != 3) {
      throw ParseError("plane preamble needs geometry=plane,dt=...,n=...",
                       lineno);
    }
  } else {
    throw ParseError("unknown geometry '" + std::string(kind) + "'", lineno);
  }
  double dt = parse_double(expect_key(fields[idx++], "dt=", lineno), lineno);
  int n = static_cast<int>(
      parse_int(expect_key(fields[idx++], "n=", lineno), lineno));

  if (!std::getline(in, line)) throw ParseError("missing movement header");
  ++lineno;
  if (strip_cr(line) != kMovementHeader) {
    throw ParseError("movement trace header must be '" +
                         std::string(kMovementHeader) + "'",
                     lineno);
  }
  if (n <= 0) throw ParseError("preamble n must be positive", 1);
  if (!(dt > 0.0)) throw ParseError("preamble dt must be positive", 1);

  std::vector<Vec2> positions;
  long row = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = strip_cr(line);
    if (s.empty()) continue;
    auto f = split_fields(s, ',');
    if (f.size() != 4) {
      throw ParseError("expected 4 comma-separated fields", lineno);
    }
    const long frame = row / n;
    const long node = row % n;
    double t = parse_double(f[0], lineno);
    NodeId id = parse_node_id(f[1], lineno);
    if (id != node) {
      throw ParseError("expected node_id " + std::to_string(node) +
                           " (rows are frame-grouped, ids ascending)",
                       lineno);
    }
    const double expected_t = static_cast<double>(frame) * dt;
    if (std::abs(t - expected_t) > 1e-6 * std::max(1.0, std::abs(expected_t))) {
      throw ParseError("row time " + format_double(t) +
                           " does not match frame time " +
                           format_double(expected_t),
                       lineno);
    }
    positions.push_back({parse_double(f[2], lineno), parse_double(f[3], lineno)});
    ++row;
  }
  if (row == 0) throw ParseError("movement trace has no position rows");
  if (row % n != 0) {
    throw ParseError("last frame is incomplete: " + std::to_string(row) +
                     " rows for n=" + std::to_string(n));
  }
  return MovementTrace(n, dt, geometry, std::move(positions));
}

void save_movement_trace(std::ostream& out, const MovementTrace& trace) {
  std::string buf;
  buf += "# geometry=";
  if (trace.geometry().is_torus()) {
    buf += "torus,";
    append_double(buf, trace.geometry().width());
    buf += ',';
    append_double(buf, trace.geometry().height());
  } else {
    buf += "plane";
  }
  buf += ",dt=";
  append_double(buf, trace.dt());
  buf += ",n=";
  buf += std::to_string(trace.node_count());
  buf += '\n';
  buf += kMovementHeader;
  buf += '\n';

  for (int k = 0; k < trace.frame_count(); ++k) {
    const double t = k * trace.dt();
    auto frame = trace.frame(k);
    for (NodeId i = 0; i < trace.node_count(); ++i) {
      append_double(buf, t);
      buf += ',';
      buf += std::to_string(i);
      buf += ',';
      append_double(buf, frame[i].x);
      buf += ',';
      append_double(buf, frame[i].y);
      buf += '\n';
    }
    // Flush periodically so huge traces do not hold the whole file in memory.
    if (buf.size() > (1u << 20)) {
      out << buf;
      buf.clear();
    }
  }
  out << buf;
}

}  // namespace mobinfer
