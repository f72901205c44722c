#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mobinfer/movement_trace.hpp"

namespace mobinfer {

// Random Waypoint on a torus. Nodes 0..anchors.size()-1 are pinned at the
// anchor positions for the whole run; the remaining nodes repeatedly pick a
// uniform waypoint, travel to it along the shortest torus path at a speed
// drawn uniformly from [v_min, v_max], pause, and repeat.
struct RwpConfig {
  int node_count = 50;
  double width = 1000.0;
  double height = 1000.0;
  double v_min = 1.0;
  double v_max = 10.0;
  double pause = 0.0;
  double duration = 300.0;
  double dt = 1.0;
  std::vector<Vec2> anchors;
  std::uint64_t seed = 1;
  // When set, must hold node_count entries; anchor slots are overridden by
  // their anchor position. When unset, starting positions are drawn
  // uniformly on the torus.
  std::optional<std::vector<Vec2>> initial_positions;

  void validate() const;  // throws ConfigError
};

// Deterministic given the seed: one SplitMix64 stream, consumed node by node
// in ascending id order; within a node, draws are (x0, y0 if no initial
// position) then (waypoint x, waypoint y, speed) per leg.
MovementTrace generate_rwp(const RwpConfig& config);

}  // namespace mobinfer
