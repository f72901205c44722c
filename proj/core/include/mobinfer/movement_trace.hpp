#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "mobinfer/contact_trace.hpp"
#include "mobinfer/geometry.hpp"

namespace mobinfer {

// Time-indexed 2D positions for every node at a uniform timestep. Frame k
// corresponds to time k*dt. Under torus geometry all stored coordinates are
// canonicalized into [0, width) x [0, height). Immutable after construction.
class MovementTrace {
 public:
  // positions is frame-major: positions[k * node_count + i] is node i at
  // frame k. Its size must be a positive multiple of node_count.
  MovementTrace(int node_count, double dt, Geometry geometry,
                std::vector<Vec2> positions);

  int node_count() const noexcept { return node_count_; }
  double dt() const noexcept { return dt_; }
  const Geometry& geometry() const noexcept { return geometry_; }
  int frame_count() const noexcept {
    return static_cast<int>(positions_.size()) / node_count_;
  }
  double duration() const noexcept { return (frame_count() - 1) * dt_; }

  std::span<const Vec2> frame(int k) const;
  Vec2 position(int frame, NodeId node) const {
    return positions_[static_cast<std::size_t>(frame) * node_count_ + node];
  }

  // Frame at index round(t/dt); no interpolation. Throws std::domain_error
  // when t is outside [0, duration].
  std::span<const Vec2> positions_at(double t) const;
  int frame_index_at(double t) const;

  friend bool operator==(const MovementTrace&, const MovementTrace&) = default;

 private:
  int node_count_ = 0;
  double dt_ = 0.0;
  Geometry geometry_;
  std::vector<Vec2> positions_;
};

struct SpeedViolation {
  NodeId node = 0;
  int frame = 0;  // step from this frame to frame+1

  friend bool operator==(const SpeedViolation&,
                         const SpeedViolation&) = default;
};

// Every (node, frame) whose step to the next frame exceeds v_max*dt by more
// than 1e-9 m (absolute slack for exact-boundary motion). Displacements are
// measured in the trace's own geometry. Requires at least 2 frames.
std::vector<SpeedViolation> max_speed_violations(const MovementTrace& trace,
                                                 double v_max);

// Nearest-frame copy of the trace at a coarser timestep; target_dt must be a
// positive integer multiple of trace.dt().
MovementTrace resample(const MovementTrace& trace, double target_dt);

// CSV with a metadata preamble, e.g.
//   # geometry=torus,1000,1000,dt=1,n=50
//   # geometry=plane,dt=0.1,n=3
// then a header `t,node_id,x,y` and one row per node per frame, grouped by
// frame, node ids ascending within each frame.
MovementTrace load_movement_trace(std::istream& in);
void save_movement_trace(std::ostream& out, const MovementTrace& trace);

}  // namespace mobinfer
