#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "mobinfer/contact_trace.hpp"
#include "mobinfer/geometry.hpp"
#include "mobinfer/keyval.hpp"
#include "mobinfer/movement_trace.hpp"

namespace mobinfer {

// All force and integration constants. The spring/repulsion constants follow
// the usual working set: K=30, l0=r/2, alpha=3/2, eps0=1, d_max=3r, tau=5,
// with G balancing attraction against repulsion at separation 3r/4 so that an
// isolated in-contact pair settles there.
struct InferenceParams {
  double r = 100.0;     // transmission range (m)
  double v_max = 10.0;  // speed ceiling (m/s)
  double K = 30.0;      // spring rigidity
  double l0 = 50.0;     // spring rest length (m)
  std::optional<double> G;  // repulsion intensity; unset = derive from 3r/4 balance
  double eps0 = 1.0;    // repulsion regularizer (m)
  double alpha = 1.5;   // repulsion exponent
  double d_max = 300.0; // repulsion cutoff (m)
  double drag = 60.0;   // drag coefficient
  double tau = 5.0;     // anticipation horizon (s)
  double mass = 20.0;   // uniform node mass
  double dt = 0.1;      // integration step (s)
  bool clamp_speed = true;
  double anticipation_cutoff = 8.0;  // skip future contacts beyond cutoff*tau
  std::uint64_t seed = 1;  // initial-placement fallback and coincidence jitter
  // Space the layout lives in. Real traces are laid out on the default
  // unbounded plane. When the trace is known to come from a wrap-around
  // arena (synthetic benchmarks), passing that torus here keeps every
  // contact geometrically satisfiable; a planar layout cannot represent
  // contacts that straddle the seam and degrades badly on such inputs.
  Geometry domain = Geometry::plane();

  // G that makes K(d - l0) = G/(d + eps0)^alpha hold at d = 3r/4.
  static double balanced_repulsion_intensity(double K, double l0, double eps0,
                                             double alpha, double r);

  // Defaults with the range-derived lengths rescaled: l0 = r/2, d_max = 3r.
  static InferenceParams defaults_for_range(double r);

  static InferenceParams from_keyvalues(const KeyValues& kv);
  void to_keyvalues(KeyValues& kv) const;
  // config syntax: "plane" or "torus,<width>,<height>"

  double repulsion_intensity() const;  // G, derived when unset
  InferenceParams resolved() const;    // copy with G filled in
  void validate() const;               // throws ConfigError
};

// Per-node placement rule.
struct NodeConstraint {
  enum class Kind { free, anchor, axis };
  enum class AxisRole { head, tail };

  Kind kind = Kind::free;
  Vec2 anchor_position{};         // anchor only
  double axis_y = 0.0;            // axis only
  AxisRole role = AxisRole::head; // axis only

  static NodeConstraint free_node() { return {}; }
  static NodeConstraint anchored(Vec2 position);
  static NodeConstraint on_axis(double y, AxisRole role);
};

// Constraints for a whole node population; unlisted nodes are free. At most
// one head and one tail.
class ConstraintSet {
 public:
  explicit ConstraintSet(int node_count);
  ConstraintSet(int node_count,
                std::span<const std::pair<NodeId, NodeConstraint>> entries);

  int node_count() const noexcept {
    return static_cast<int>(per_node_.size());
  }
  const NodeConstraint& of(NodeId i) const {
    return per_node_.at(static_cast<std::size_t>(i));
  }
  std::optional<NodeId> head() const noexcept { return head_; }
  std::optional<NodeId> tail() const noexcept { return tail_; }

 private:
  std::vector<NodeConstraint> per_node_;
  std::optional<NodeId> head_;
  std::optional<NodeId> tail_;
};

Geometry parse_layout(const std::string& text);
std::string format_layout(const Geometry& g);

// CSV with header `node_id,kind,x,y,role`; kind in {anchor, axis}; role in
// {head, tail, -}; unused coordinate fields hold '-'.
std::vector<std::pair<NodeId, NodeConstraint>> load_constraints(
    std::istream& in);
void save_constraints(
    std::ostream& out,
    std::span<const std::pair<NodeId, NodeConstraint>> entries);

struct NodeState {
  Vec2 position{};
  Vec2 velocity{};
};

// Deterministic unit vector standing in for the undefined direction between
// coincident nodes; antisymmetric under swapping i and j.
Vec2 coincident_direction(NodeId i, NodeId j, std::uint64_t seed) noexcept;

// Force primitives. Directions follow the unit vector from i toward the
// other node; each returns the force acting on i. Node ids are only used to
// break the coincident-position tie deterministically.
Vec2 attraction_force(const NodeState& i, const NodeState& k, NodeId i_id,
                      NodeId k_id, const InferenceParams& params);
Vec2 repulsion_force(const NodeState& i, const NodeState& j, NodeId i_id,
                     NodeId j_id, const InferenceParams& params);
Vec2 drag_force(const NodeState& i, const InferenceParams& params);
// Spring attraction toward a future contact at t_ik, gated by
// exp(-(t_ik - t)/tau); zero beyond anticipation_cutoff*tau. Requires t < t_ik.
Vec2 anticipation_force(const NodeState& i, const NodeState& k, NodeId i_id,
                        NodeId k_id, double t, double t_ik,
                        const InferenceParams& params);

// One semi-implicit Euler step from t to t+dt: sum attraction over current
// contacts, repulsion over all pairs within d_max, drag, and anticipation
// over future contacts inside the cutoff window; velocity updates first
// (rescaled to v_max when clamp_speed), then position. Anchors never move;
// axis nodes integrate x only and are displaced to stay ahead of (behind)
// every free node by l0. Accumulation order is fixed (ascending pair, then
// node id) so results are reproducible.
std::vector<NodeState> step(const std::vector<NodeState>& states,
                            const ContactTrace& trace,
                            const ConstraintSet& constraints, double t,
                            const InferenceParams& params);

// Run the layout through the whole trace, recording a frame every dt.
// Initial positions are used verbatim when given; otherwise nodes are placed
// uniformly in a square of side sqrt(N)*r centered at the origin, seeded by
// params.seed. Output geometry is always the plane.
MovementTrace infer(const ContactTrace& trace, const ConstraintSet& constraints,
                    const std::optional<std::vector<Vec2>>& initial_positions,
                    const InferenceParams& params);

}  // namespace mobinfer
