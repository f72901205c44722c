#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "mobinfer/errors.hpp"

namespace mobinfer {

using NodeId = std::int32_t;

struct NodePair {
  NodeId a = 0;  // canonical: a < b
  NodeId b = 0;

  friend auto operator<=>(const NodePair&, const NodePair&) = default;
};

// One contact interval [t_start, t_end). Half-open, so membership queries at
// interval boundaries are unambiguous.
struct ContactEvent {
  NodeId a = 0;  // canonical: a < b
  NodeId b = 0;
  double t_start = 0.0;
  double t_end = 0.0;

  friend bool operator==(const ContactEvent&, const ContactEvent&) = default;
};

struct ContactInterval {
  double t_start = 0.0;
  double t_end = 0.0;

  friend bool operator==(const ContactInterval&,
                         const ContactInterval&) = default;
};

// All contact intervals of one pair, sorted by start and pairwise disjoint.
struct PairSchedule {
  NodePair pair;
  std::vector<ContactInterval> intervals;
};

// Position of a pair's schedule relative to a query time.
struct ScheduleStatus {
  std::optional<double> current_end;  // t_end of the interval containing t
  std::optional<double> next_start;   // smallest t_start > t
};

ScheduleStatus schedule_status(std::span<const ContactInterval> intervals,
                               double t) noexcept;

// An immutable, canonicalized contact trace over a fixed node population.
// Construction orders each pair, sorts events, merges intervals that touch
// exactly (t_end == next t_start) and rejects genuine overlaps. Safe for
// concurrent reads once built.
class ContactTrace {
 public:
  ContactTrace(int node_count, double duration,
               std::vector<ContactEvent> events);

  int node_count() const noexcept { return node_count_; }
  double duration() const noexcept { return duration_; }

  // Sorted by t_start, ties broken by (a, b).
  const std::vector<ContactEvent>& events() const noexcept { return events_; }

  // All pairs in contact at t (t_start <= t < t_end), in (a, b) order.
  // Throws std::domain_error when t is outside [0, duration].
  std::vector<NodePair> contacts_at(double t) const;

  // Smallest event start strictly after t for the pair {i, j}; nullopt when
  // no future contact exists. Throws std::domain_error for i == j or t
  // outside [0, duration].
  std::optional<double> next_contact_start(NodeId i, NodeId j, double t) const;

  // End of the contact containing t for the pair {i, j}; nullopt when the
  // pair is not in contact at t.
  std::optional<double> current_contact_end(NodeId i, NodeId j,
                                            double t) const;

  // Per-pair interval index, sorted by pair; one entry per pair that has at
  // least one event. The inference loop and the inter-contact-time metric
  // iterate this directly.
  std::span<const PairSchedule> pair_schedules() const noexcept {
    return schedules_;
  }

 private:
  const PairSchedule* find_schedule(NodeId a, NodeId b) const noexcept;
  void check_query(NodeId i, NodeId j, double t) const;
  void check_time(double t) const;

  int node_count_ = 0;
  double duration_ = 0.0;
  std::vector<ContactEvent> events_;
  std::vector<PairSchedule> schedules_;  // sorted by pair
};

// CSV with header line exactly `id_a,id_b,t_start,t_end`; one event per line;
// lines need not be pre-sorted. node_count and duration are not part of the
// file and must be supplied by the caller (CLI flags or a companion file).
ContactTrace load_contact_trace(std::istream& in, int node_count,
                                double duration);
void save_contact_trace(std::ostream& out, const ContactTrace& trace);

}  // namespace mobinfer
