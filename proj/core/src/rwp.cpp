#include "mobinfer/rwp.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "mobinfer/rng.hpp"

namespace mobinfer {

void RwpConfig::validate() const {
  if (node_count <= 0) throw ConfigError("node_count must be positive");
  if (!(width > 0.0) || !(height > 0.0)) {
    throw ConfigError("torus dimensions must be positive");
  }
  if (!(v_min > 0.0) || !(v_min <= v_max)) {
    throw ConfigError("speeds must satisfy 0 < v_min <= v_max");
  }
  if (!(pause >= 0.0)) throw ConfigError("pause must be non-negative");
  if (!(duration >= 0.0)) throw ConfigError("duration must be non-negative");
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (static_cast<int>(anchors.size()) > node_count) {
    throw ConfigError("more anchors than nodes");
  }
  for (const Vec2& a : anchors) {
    if (!(a.x >= 0.0 && a.x < width && a.y >= 0.0 && a.y < height)) {
      throw ConfigError("anchor outside torus bounds");
    }
  }
  if (initial_positions &&
      static_cast<int>(initial_positions->size()) != node_count) {
    throw ConfigError("initial_positions must hold one entry per node");
  }
}

MovementTrace generate_rwp(const RwpConfig& config) {
  config.validate();

  const Geometry torus = Geometry::torus(config.width, config.height);
  const int frames =
      static_cast<int>(std::floor(config.duration / config.dt + 1e-9)) + 1;
  const int n = config.node_count;
  const int anchor_count = static_cast<int>(config.anchors.size());

  std::vector<Vec2> positions(static_cast<std::size_t>(frames) * n);
  auto at = [&](int frame, int node) -> Vec2& {
    return positions[static_cast<std::size_t>(frame) * n + node];
  };

  SplitMix64 rng(config.seed);
  for (int i = 0; i < n; ++i) {
    if (i < anchor_count) {
      for (int k = 0; k < frames; ++k) at(k, i) = config.anchors[i];
      continue;
    }

    Vec2 pos;
    if (config.initial_positions) {
      pos = torus.canonical((*config.initial_positions)[i]);
    } else {
      pos.x = rng.uniform(0.0, config.width);
      pos.y = rng.uniform(0.0, config.height);
    }
    at(0, i) = pos;

    // Walk legs forward in continuous time, emitting each frame as its time
    // falls inside the current travel or pause span.
    double t = 0.0;
    int next_frame = 1;
    while (next_frame < frames) {
      const Vec2 waypoint{rng.uniform(0.0, config.width),
                          rng.uniform(0.0, config.height)};
      const double speed = rng.uniform(config.v_min, config.v_max);
      const Vec2 disp = torus.displacement(pos, waypoint);
      const double len = norm(disp);
      const double travel = len / speed;

      while (next_frame < frames) {
        const double ft = next_frame * config.dt;
        if (ft > t + travel) break;
        const double s = (ft - t) / travel;  // travel > 0 here: ft > t
        at(next_frame, i) = torus.canonical(pos + s * disp);
        ++next_frame;
      }
      t += travel;
      pos = waypoint;

      if (config.pause > 0.0) {
        while (next_frame < frames && next_frame * config.dt <= t + config.pause) {
          at(next_frame, i) = pos;
          ++next_frame;
        }
        t += config.pause;
      }
    }
  }

  return MovementTrace(n, config.dt, torus, std::move(positions));
}

}  // namespace mobinfer
