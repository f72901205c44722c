#include "mobinfer/inference.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

#include "mobinfer/num_format.hpp"
#include "mobinfer/rng.hpp"

namespace mobinfer {

double InferenceParams::balanced_repulsion_intensity(double K, double l0,
                                                     double eps0, double alpha,
                                                     double r) {
  const double d = 0.75 * r;
  if (!(d > l0)) {
    throw ConfigError(
        "cannot balance repulsion at 3r/4: requires l0 < 3r/4");
  }
  return K * (d - l0) * std::pow(d + eps0, alpha);
}

InferenceParams InferenceParams::defaults_for_range(double r) {
  InferenceParams p;
  p.r = r;
  p.l0 = 0.5 * r;
  p.d_max = 3.0 * r;
  p.G.reset();
  return p;
}

double InferenceParams::repulsion_intensity() const {
  if (G) return *G;
  return balanced_repulsion_intensity(K, l0, eps0, alpha, r);
}

InferenceParams InferenceParams::resolved() const {
  InferenceParams p = *this;
  p.G = repulsion_intensity();
  return p;
}

void InferenceParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string("parameter ") + name +
                        " must be positive and finite");
    }
  };
  positive(r, "r");
  positive(v_max, "vmax");
  positive(K, "K");
  positive(l0, "l0");
  positive(eps0, "eps0");
  positive(alpha, "alpha");
  positive(d_max, "dmax");
  positive(tau, "tau");
  positive(mass, "mass");
  positive(dt, "dt");
  if (G) positive(*G, "G");
  if (!(drag >= 0.0)) throw ConfigError("parameter drag must be >= 0");
  if (!(anticipation_cutoff >= 0.0)) {
    throw ConfigError("parameter anticipation_cutoff must be >= 0");
  }
  if (!(l0 < r)) throw ConfigError("l0 must be below the transmission range");
  if (!(d_max > r)) throw ConfigError("dmax must exceed the transmission range");
}

InferenceParams InferenceParams::from_keyvalues(const KeyValues& kv) {
  InferenceParams base;
  InferenceParams p = defaults_for_range(kv.get_double("r", base.r));
  p.v_max = kv.get_double("vmax", p.v_max);
  p.K = kv.get_double("K", p.K);
  p.l0 = kv.get_double("l0", p.l0);
  p.G = kv.get_double_opt("G");
  p.eps0 = kv.get_double("eps0", p.eps0);
  p.alpha = kv.get_double("alpha", p.alpha);
  p.d_max = kv.get_double("dmax", p.d_max);
  p.drag = kv.get_double("drag", p.drag);
  p.tau = kv.get_double("tau", p.tau);
  p.mass = kv.get_double("mass", p.mass);
  p.dt = kv.get_double("dt", p.dt);
  p.clamp_speed = kv.get_bool("clamp_speed", p.clamp_speed);
  p.anticipation_cutoff =
      kv.get_double("anticipation_cutoff", p.anticipation_cutoff);
  p.seed = static_cast<std::uint64_t>(
      kv.get_int("seed", static_cast<std::int64_t>(p.seed)));
  if (auto layout = kv.get("layout")) {
    p.domain = parse_layout(*layout);
  }
  return p;
}

// "plane" or "torus,<width>,<height>"
Geometry parse_layout(const std::string& text) {
  if (text == "plane") return Geometry::plane();
  if (text.rfind("torus,", 0) == 0) {
    const auto rest = text.substr(6);
    const auto comma = rest.find(',');
    if (comma != std::string::npos) {
      try {
        return Geometry::torus(parse_double(rest.substr(0, comma)),
                               parse_double(rest.substr(comma + 1)));
      } catch (const ParseError&) {
        // fall through to the ConfigError below
      }
    }
  }
  throw ConfigError("layout must be 'plane' or 'torus,<width>,<height>': '" +
                    text + "'");
}

std::string format_layout(const Geometry& g) {
  if (!g.is_torus()) return "plane";
  return "torus," + format_double(g.width()) + "," + format_double(g.height());
}

void InferenceParams::to_keyvalues(KeyValues& kv) const {
  kv.set_double("r", r);
  kv.set_double("vmax", v_max);
  kv.set_double("K", K);
  kv.set_double("l0", l0);
  kv.set_double("G", repulsion_intensity());
  kv.set_double("eps0", eps0);
  kv.set_double("alpha", alpha);
  kv.set_double("dmax", d_max);
  kv.set_double("drag", drag);
  kv.set_double("tau", tau);
  kv.set_double("mass", mass);
  kv.set_double("dt", dt);
  kv.set_bool("clamp_speed", clamp_speed);
  kv.set_double("anticipation_cutoff", anticipation_cutoff);
  kv.set_int("seed", static_cast<std::int64_t>(seed));
  kv.set("layout", format_layout(domain));
}

NodeConstraint NodeConstraint::anchored(Vec2 position) {
  NodeConstraint c;
  c.kind = Kind::anchor;
  c.anchor_position = position;
  return c;
}

NodeConstraint NodeConstraint::on_axis(double y, AxisRole role) {
  NodeConstraint c;
  c.kind = Kind::axis;
  c.axis_y = y;
  c.role = role;
  return c;
}

ConstraintSet::ConstraintSet(int node_count) {
  if (node_count <= 0) throw ValidationError("node_count must be positive");
  per_node_.resize(node_count);
}

ConstraintSet::ConstraintSet(
    int node_count,
    std::span<const std::pair<NodeId, NodeConstraint>> entries)
    : ConstraintSet(node_count) {
  std::vector<bool> seen(node_count, false);
  for (const auto& [id, c] : entries) {
    if (id < 0 || id >= node_count) {
      throw ValidationError("constraint for node " + std::to_string(id) +
                            " outside population of " +
                            std::to_string(node_count));
    }
    if (seen[id]) {
      throw ValidationError("duplicate constraint for node " +
                            std::to_string(id));
    }
    seen[id] = true;
    switch (c.kind) {
      case NodeConstraint::Kind::anchor:
        if (!std::isfinite(c.anchor_position.x) ||
            !std::isfinite(c.anchor_position.y)) {
          throw ValidationError("anchor position must be finite");
        }
        break;
      case NodeConstraint::Kind::axis:
        if (!std::isfinite(c.axis_y)) {
          throw ValidationError("axis ordinate must be finite");
        }
        if (c.role == NodeConstraint::AxisRole::head) {
          if (head_) throw ValidationError("more than one head node");
          head_ = id;
        } else {
          if (tail_) throw ValidationError("more than one tail node");
          tail_ = id;
        }
        break;
      case NodeConstraint::Kind::free:
        break;
    }
    per_node_[id] = c;
  }
}

namespace {

constexpr const char* kConstraintHeader = "node_id,kind,x,y,role";

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

}  // namespace

std::vector<std::pair<NodeId, NodeConstraint>> load_constraints(
    std::istream& in) {
  std::string line;
  long lineno = 0;
  if (!std::getline(in, line)) throw ParseError("empty constraints file");
  ++lineno;
  if (strip_cr(line) != kConstraintHeader) {
    throw ParseError("constraints header must be '" +
                         std::string(kConstraintHeader) + "'",
                     lineno);
  }

  std::vector<std::pair<NodeId, NodeConstraint>> out;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = strip_cr(line);
    if (s.empty()) continue;
    auto f = split_fields(s, ',');
    if (f.size() != 5) {
      throw ParseError("expected 5 comma-separated fields", lineno);
    }
    const NodeId id = parse_node_id(f[0], lineno);
    if (f[1] == "anchor") {
      if (f[4] != "-") {
        throw ParseError("anchor rows must have role '-'", lineno);
      }
      out.emplace_back(id, NodeConstraint::anchored({parse_double(f[2], lineno),
                                                     parse_double(f[3], lineno)}));
    } else if (f[1] == "axis") {
      if (f[2] != "-") {
        throw ParseError("axis rows must have x '-'", lineno);
      }
      NodeConstraint::AxisRole role;
      if (f[4] == "head") {
        role = NodeConstraint::AxisRole::head;
      } else if (f[4] == "tail") {
        role = NodeConstraint::AxisRole::tail;
      } else {
        throw ParseError("axis role must be head or tail", lineno);
      }
      out.emplace_back(id,
                       NodeConstraint::on_axis(parse_double(f[3], lineno), role));
    } else {
      throw ParseError("kind must be anchor or axis", lineno);
    }
  }
  return out;
}

void save_constraints(
    std::ostream& out,
    std::span<const std::pair<NodeId, NodeConstraint>> entries) {
  std::string buf;
  buf += kConstraintHeader;
  buf += '\n';
  for (const auto& [id, c] : entries) {
    if (c.kind == NodeConstraint::Kind::free) continue;
    buf += std::to_string(id);
    if (c.kind == NodeConstraint::Kind::anchor) {
      buf += ",anchor,";
      append_double(buf, c.anchor_position.x);
      buf += ',';
      append_double(buf, c.anchor_position.y);
      buf += ",-\n";
    } else {
      buf += ",axis,-,";
      append_double(buf, c.axis_y);
      buf += c.role == NodeConstraint::AxisRole::head ? ",head\n" : ",tail\n";
    }
  }
  out << buf;
}

Vec2 coincident_direction(NodeId i, NodeId j, std::uint64_t seed) noexcept {
  const NodeId lo = std::min(i, j);
  const NodeId hi = std::max(i, j);
  const std::uint64_t h = mix_hash(static_cast<std::uint64_t>(lo),
                                   static_cast<std::uint64_t>(hi), seed);
  const double angle =
      2.0 * std::numbers::pi * (static_cast<double>(h >> 11) * 0x1.0p-53);
  Vec2 u{std::cos(angle), std::sin(angle)};
  return i <= j ? u : -u;  // antisymmetric so pair forces stay equal-opposite
}

namespace {

struct Separation {
  double dist;
  Vec2 unit;  // from i toward the other node, shortest path in the domain
};

Separation separation(const NodeState& i, const NodeState& k, NodeId i_id,
                      NodeId k_id, const InferenceParams& p) noexcept {
  const Vec2 d = p.domain.displacement(i.position, k.position);
  const double dist = norm(d);
  if (dist > 0.0) return {dist, {d.x / dist, d.y / dist}};
  return {0.0, coincident_direction(i_id, k_id, p.seed)};
}

double repulsion_magnitude(double dist, const InferenceParams& p) {
  return p.repulsion_intensity() / std::pow(dist + p.eps0, p.alpha);
}

}  // namespace

Vec2 attraction_force(const NodeState& i, const NodeState& k, NodeId i_id,
                      NodeId k_id, const InferenceParams& params) {
  const auto [dist, unit] = separation(i, k, i_id, k_id, params);
  return params.K * (dist - params.l0) * unit;
}

Vec2 repulsion_force(const NodeState& i, const NodeState& j, NodeId i_id,
                     NodeId j_id, const InferenceParams& params) {
  const auto [dist, unit] = separation(i, j, i_id, j_id, params);
  if (dist >= params.d_max) return {};
  return -repulsion_magnitude(dist, params) * unit;
}

Vec2 drag_force(const NodeState& i, const InferenceParams& params) {
  return -params.drag * i.velocity;
}

Vec2 anticipation_force(const NodeState& i, const NodeState& k, NodeId i_id,
                        NodeId k_id, double t, double t_ik,
                        const InferenceParams& params) {
  if (!(t < t_ik)) {
    throw std::domain_error("anticipation requires t < t_ik");
  }
  const double gap = t_ik - t;
  if (gap > params.anticipation_cutoff * params.tau) return {};
  const auto [dist, unit] = separation(i, k, i_id, k_id, params);
  return params.K * (dist - params.l0) * std::exp(-gap / params.tau) * unit;
}

std::vector<NodeState> step(const std::vector<NodeState>& states,
                            const ContactTrace& trace,
                            const ConstraintSet& constraints, double t,
                            const InferenceParams& params) {
  const int n = trace.node_count();
  if (static_cast<int>(states.size()) != n ||
      constraints.node_count() != n) {
    throw std::domain_error("states/constraints size does not match trace");
  }
  if (!(t >= 0.0) || t + params.dt > trace.duration() + 1e-9) {
    throw std::domain_error("step would leave the trace duration");
  }
  if ((constraints.head() || constraints.tail()) && params.domain.is_torus()) {
    // head/tail ordering has no meaning on a wrap-around x axis
    throw ConfigError("axis constraints require a planar layout domain");
  }

  const double G = params.repulsion_intensity();
  const double window = params.anticipation_cutoff * params.tau;
  std::vector<Vec2> force(n);

  // Contact-driven pair forces, ascending pair order. Each pair force is
  // computed once and applied with opposite signs, so Newton's third law
  // holds exactly.
  for (const PairSchedule& s : trace.pair_schedules()) {
    const NodeId a = s.pair.a;
    const NodeId b = s.pair.b;
    const ScheduleStatus st = schedule_status(s.intervals, t);
    const auto [dist, unit] =
        separation(states[a], states[b], a, b, params);
    if (st.current_end) {
      const Vec2 f = params.K * (dist - params.l0) * unit;
      force[a] += f;
      force[b] -= f;
    } else if (st.next_start) {
      const double gap = *st.next_start - t;
      if (gap <= window) {
        const Vec2 f =
            params.K * (dist - params.l0) * std::exp(-gap / params.tau) * unit;
        force[a] += f;
        force[b] -= f;
      }
    }
  }

  // Repulsion acts between every pair within d_max, in contact or not.
  for (NodeId a = 0; a < n; ++a) {
    for (NodeId b = a + 1; b < n; ++b) {
      const auto [dist, unit] =
          separation(states[a], states[b], a, b, params);
      if (dist >= params.d_max) continue;
      const Vec2 f = -(G / std::pow(dist + params.eps0, params.alpha)) * unit;
      force[a] += f;
      force[b] -= f;
    }
  }

  for (NodeId i = 0; i < n; ++i) {
    force[i] += -params.drag * states[i].velocity;
    if (!std::isfinite(force[i].x) || !std::isfinite(force[i].y)) {
      throw Error("non-finite force on node " + std::to_string(i) + " at t=" +
                  format_double(t) + " (position " +
                  format_double(states[i].position.x) + "," +
                  format_double(states[i].position.y) + ")");
    }
  }

  std::vector<NodeState> next(states);
  const double inv_mass = 1.0 / params.mass;
  for (NodeId i = 0; i < n; ++i) {
    const NodeConstraint& c = constraints.of(i);
    NodeState& s = next[i];
    switch (c.kind) {
      case NodeConstraint::Kind::anchor:
        s.position = c.anchor_position;
        s.velocity = {};
        break;
      case NodeConstraint::Kind::free: {
        s.velocity += params.dt * inv_mass * force[i];
        if (params.clamp_speed) {
          const double speed = norm(s.velocity);
          if (speed > params.v_max) s.velocity *= params.v_max / speed;
        }
        s.position = params.domain.canonical(s.position + params.dt * s.velocity);
        break;
      }
      case NodeConstraint::Kind::axis: {
        // Only the x component integrates; y is pinned to the axis.
        s.velocity.x += params.dt * inv_mass * force[i].x;
        s.velocity.y = 0.0;
        if (params.clamp_speed) {
          const double speed = std::abs(s.velocity.x);
          if (speed > params.v_max) s.velocity.x *= params.v_max / speed;
        }
        s.position.x += params.dt * s.velocity.x;
        s.position.y = c.axis_y;
        break;
      }
    }
  }

  // Keep the head strictly ahead of (and the tail behind) every free node,
  // displaced to the extremum plus (minus) the spring rest length.
  if (constraints.head() || constraints.tail()) {
    bool any_free = false;
    double min_x = 0.0;
    double max_x = 0.0;
    for (NodeId i = 0; i < n; ++i) {
      if (constraints.of(i).kind != NodeConstraint::Kind::free) continue;
      const double x = next[i].position.x;
      if (!any_free) {
        min_x = max_x = x;
        any_free = true;
      } else {
        min_x = std::min(min_x, x);
        max_x = std::max(max_x, x);
      }
    }
    if (any_free) {
      if (auto h = constraints.head(); h && max_x > next[*h].position.x) {
        next[*h].position.x = max_x + params.l0;
      }
      if (auto tl = constraints.tail(); tl && min_x < next[*tl].position.x) {
        next[*tl].position.x = min_x - params.l0;
      }
    }
  }

  return next;
}

MovementTrace infer(const ContactTrace& trace, const ConstraintSet& constraints,
                    const std::optional<std::vector<Vec2>>& initial_positions,
                    const InferenceParams& raw_params) {
  raw_params.validate();
  const InferenceParams params = raw_params.resolved();
  const int n = trace.node_count();
  if (constraints.node_count() != n) {
    throw ValidationError("constraint set covers " +
                          std::to_string(constraints.node_count()) +
                          " nodes, trace has " + std::to_string(n));
  }
  if (initial_positions && static_cast<int>(initial_positions->size()) != n) {
    throw ValidationError("initial positions must hold one entry per node");
  }

  std::vector<NodeState> states(n);
  SplitMix64 rng(params.seed);
  // Fallback placement: uniform over a torus domain; on the plane, a square
  // whose side keeps initial density near one node per r^2.
  const double side = std::sqrt(static_cast<double>(n)) * params.r;
  for (NodeId i = 0; i < n; ++i) {
    const NodeConstraint& c = constraints.of(i);
    Vec2 p;
    if (c.kind == NodeConstraint::Kind::anchor) {
      p = c.anchor_position;
    } else if (initial_positions) {
      p = (*initial_positions)[i];
    } else if (params.domain.is_torus()) {
      p.x = rng.uniform(0.0, params.domain.width());
      p.y = rng.uniform(0.0, params.domain.height());
    } else {
      p.x = rng.uniform(-0.5 * side, 0.5 * side);
      p.y = rng.uniform(-0.5 * side, 0.5 * side);
    }
    if (c.kind == NodeConstraint::Kind::axis) p.y = c.axis_y;
    states[i].position = params.domain.canonical(p);
    if (!std::isfinite(states[i].position.x) ||
        !std::isfinite(states[i].position.y)) {
      throw ValidationError("non-finite initial position for node " +
                            std::to_string(i));
    }
  }

  const int steps =
      static_cast<int>(std::floor(trace.duration() / params.dt + 1e-9));
  std::vector<Vec2> frames;
  frames.reserve(static_cast<std::size_t>(steps + 1) * n);
  auto record = [&](const std::vector<NodeState>& st) {
    for (const NodeState& s : st) frames.push_back(s.position);
  };
  record(states);
  for (int k = 0; k < steps; ++k) {
    states = step(states, trace, constraints, k * params.dt, params);
    record(states);
  }

  return MovementTrace(n, params.dt, params.domain, std::move(frames));
}

}  // namespace mobinfer
