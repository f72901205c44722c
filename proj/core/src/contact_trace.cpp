#include "mobinfer/contact_trace.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

#include "mobinfer/num_format.hpp"

namespace mobinfer {

ScheduleStatus schedule_status(std::span<const ContactInterval> intervals,
                               double t) noexcept {
  ScheduleStatus st;
  // First interval with t_start > t; the one before it is the only candidate
  // for containing t.
  auto it = std::upper_bound(
      intervals.begin(), intervals.end(), t,
      [](double value, const ContactInterval& iv) { return value < iv.t_start; });
  if (it != intervals.begin()) {
    const ContactInterval& prev = *(it - 1);
    if (t < prev.t_end) st.current_end = prev.t_end;
  }
  if (it != intervals.end()) st.next_start = it->t_start;
  return st;
}

ContactTrace::ContactTrace(int node_count, double duration,
                           std::vector<ContactEvent> events)
    : node_count_(node_count), duration_(duration) {
  if (node_count_ <= 0) {
    throw ValidationError("node_count must be positive");
  }
  if (!(duration_ >= 0.0)) {
    throw ValidationError("duration must be non-negative");
  }

  for (ContactEvent& e : events) {
    if (e.a == e.b) {
      throw ValidationError("contact event with identical endpoints (node " +
                            std::to_string(e.a) + ")");
    }
    if (e.a > e.b) std::swap(e.a, e.b);
    if (e.a < 0 || e.b >= node_count_) {
      throw ValidationError("node id out of range in event (" +
                            std::to_string(e.a) + "," + std::to_string(e.b) +
                            "); node_count=" + std::to_string(node_count_));
    }
    if (!(e.t_start < e.t_end)) {
      throw ValidationError("event for pair (" + std::to_string(e.a) + "," +
                            std::to_string(e.b) + ") has t_start >= t_end");
    }
    if (e.t_start < 0.0 || e.t_end > duration_) {
      throw ValidationError("event for pair (" + std::to_string(e.a) + "," +
                            std::to_string(e.b) + ") outside [0, duration]");
    }
  }

  std::sort(events.begin(), events.end(),
            [](const ContactEvent& x, const ContactEvent& y) {
              if (x.a != y.a) return x.a < y.a;
              if (x.b != y.b) return x.b < y.b;
              return x.t_start < y.t_start;
            });

  // Per pair: merge touching intervals, reject true overlaps.
  for (std::size_t i = 0; i < events.size();) {
    PairSchedule sched;
    sched.pair = {events[i].a, events[i].b};
    sched.intervals.push_back({events[i].t_start, events[i].t_end});
    std::size_t j = i + 1;
    for (; j < events.size() && events[j].a == sched.pair.a &&
           events[j].b == sched.pair.b;
         ++j) {
      ContactInterval& last = sched.intervals.back();
      if (events[j].t_start < last.t_end) {
        throw ValidationError(
            "overlapping contact intervals for pair (" +
            std::to_string(sched.pair.a) + "," + std::to_string(sched.pair.b) +
            ") around t=" + format_double(events[j].t_start));
      }
      if (events[j].t_start == last.t_end) {
        last.t_end = events[j].t_end;  // adjacent: merge
      } else {
        sched.intervals.push_back({events[j].t_start, events[j].t_end});
      }
    }
    schedules_.push_back(std::move(sched));
    i = j;
  }

  events_.clear();
  for (const PairSchedule& s : schedules_) {
    for (const ContactInterval& iv : s.intervals) {
      events_.push_back({s.pair.a, s.pair.b, iv.t_start, iv.t_end});
    }
  }
  std::sort(events_.begin(), events_.end(),
            [](const ContactEvent& x, const ContactEvent& y) {
              if (x.t_start != y.t_start) return x.t_start < y.t_start;
              if (x.a != y.a) return x.a < y.a;
              return x.b < y.b;
            });
}

const PairSchedule* ContactTrace::find_schedule(NodeId a,
                                                NodeId b) const noexcept {
  NodePair key{a, b};
  auto it = std::lower_bound(schedules_.begin(), schedules_.end(), key,
                             [](const PairSchedule& s, const NodePair& p) {
                               return s.pair < p;
                             });
  if (it == schedules_.end() || !(it->pair == key)) return nullptr;
  return &*it;
}

void ContactTrace::check_time(double t) const {
  if (!(t >= 0.0 && t <= duration_)) {
    throw std::domain_error("query time " + format_double(t) +
                            " outside trace duration [0, " +
                            format_double(duration_) + "]");
  }
}

void ContactTrace::check_query(NodeId i, NodeId j, double t) const {
  if (i == j) throw std::domain_error("pair query with i == j");
  if (i < 0 || j < 0 || i >= node_count_ || j >= node_count_) {
    throw std::domain_error("pair query with node id out of range");
  }
  check_time(t);
}

std::vector<NodePair> ContactTrace::contacts_at(double t) const {
  check_time(t);
  std::vector<NodePair> out;
  for (const PairSchedule& s : schedules_) {
    if (schedule_status(s.intervals, t).current_end) out.push_back(s.pair);
  }
  return out;  // schedules_ is pair-sorted, so out is too
}

std::optional<double> ContactTrace::next_contact_start(NodeId i, NodeId j,
                                                       double t) const {
  check_query(i, j, t);
  if (i > j) std::swap(i, j);
  const PairSchedule* s = find_schedule(i, j);
  if (!s) return std::nullopt;
  return schedule_status(s->intervals, t).next_start;
}

std::optional<double> ContactTrace::current_contact_end(NodeId i, NodeId j,
                                                        double t) const {
  check_query(i, j, t);
  if (i > j) std::swap(i, j);
  const PairSchedule* s = find_schedule(i, j);
  if (!s) return std::nullopt;
  return schedule_status(s->intervals, t).current_end;
}

namespace {

constexpr const char* kContactHeader = "id_a,id_b,t_start,t_end";

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

std::string_view strip_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

}  // namespace

ContactTrace load_contact_trace(std::istream& in, int node_count,
                                double duration) {
  std::string line;
  long lineno = 0;
  if (!std::getline(in, line)) {
    throw ParseError("empty contact trace file");
  }
  ++lineno;
  if (strip_cr(line) != kContactHeader) {
    throw ParseError("contact trace header must be '" +
                         std::string(kContactHeader) + "'",
                     lineno);
  }

  std::vector<ContactEvent> events;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = strip_cr(line);
    if (s.empty()) continue;
    auto fields = split_fields(s, ',');
    if (fields.size() != 4) {
      throw ParseError("expected 4 comma-separated fields", lineno);
    }
    ContactEvent e;
    e.a = parse_node_id(fields[0], lineno);
    e.b = parse_node_id(fields[1], lineno);
    e.t_start = parse_double(fields[2], lineno);
    e.t_end = parse_double(fields[3], lineno);
    events.push_back(e);
  }
  return ContactTrace(node_count, duration, std::move(events));
}

void save_contact_trace(std::ostream& out, const ContactTrace& trace) {
  std::string buf;
  buf += kContactHeader;
  buf += '\n';
  for (const ContactEvent& e : trace.events()) {
    buf += std::to_string(e.a);
    buf += ',';
    buf += std::to_string(e.b);
    buf += ',';
    append_double(buf, e.t_start);
    buf += ',';
    append_double(buf, e.t_end);
    buf += '\n';
  }
  out << buf;
}

}  // namespace mobinfer
