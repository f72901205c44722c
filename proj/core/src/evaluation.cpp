#include "mobinfer/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "mobinfer/extraction.hpp"
#include "mobinfer/num_format.hpp"

namespace mobinfer {

double pairwise_distance_correlation(const MovementTrace& a,
                                     const MovementTrace& b) {
  if (a.node_count() != b.node_count()) {
    throw std::domain_error("traces have different node counts");
  }
  if (a.dt() != b.dt()) {
    throw std::domain_error("traces have different timesteps");
  }
  const int n = a.node_count();
  if (n < 2) throw std::domain_error("need at least two nodes");
  const int frames = std::min(a.frame_count(), b.frame_count());

  // Welford co-moment accumulation; numerically stable for long runs.
  long long count = 0;
  double mean_x = 0.0, mean_y = 0.0;
  double m_xx = 0.0, m_yy = 0.0, m_xy = 0.0;
  for (int k = 0; k < frames; ++k) {
    auto fa = a.frame(k);
    auto fb = b.frame(k);
    for (NodeId i = 0; i < n; ++i) {
      for (NodeId j = i + 1; j < n; ++j) {
        const double x = a.geometry().distance(fa[i], fa[j]);
        const double y = b.geometry().distance(fb[i], fb[j]);
        ++count;
        const double dx = x - mean_x;
        const double dy = y - mean_y;
        mean_x += dx / static_cast<double>(count);
        mean_y += dy / static_cast<double>(count);
        m_xx += dx * (x - mean_x);
        m_yy += dy * (y - mean_y);
        m_xy += dx * (y - mean_y);
      }
    }
  }

  if (!(m_xx > 0.0) || !(m_yy > 0.0)) {
    throw std::domain_error(
        "correlation undefined: a distance series has zero variance");
  }
  // Cauchy-Schwarz equality means the series are perfectly correlated; return
  // the exact +/-1 rather than a rounded quotient.
  if (m_xy * m_xy == m_xx * m_yy) return m_xy > 0.0 ? 1.0 : -1.0;
  const double r = m_xy / std::sqrt(m_xx * m_yy);
  return std::clamp(r, -1.0, 1.0);
}

ContactAccuracy contact_accuracy(const ContactTrace& original,
                                 const MovementTrace& inferred_mobility,
                                 double range) {
  const int n = original.node_count();
  if (inferred_mobility.node_count() != n) {
    throw std::domain_error("traces have different node counts");
  }

  ContactAccuracy out;
  double missed_sum = 0.0;
  double added_sum = 0.0;
  std::vector<char> in_contact(static_cast<std::size_t>(n) * n, 0);

  for (int k = 0; k < inferred_mobility.frame_count(); ++k) {
    const double t = k * inferred_mobility.dt();
    if (t > original.duration() + 1e-9) break;
    const auto contacts = original.contacts_at(std::min(t, original.duration()));
    for (const NodePair& p : contacts) {
      in_contact[static_cast<std::size_t>(p.a) * n + p.b] = 1;
    }

    auto frame = inferred_mobility.frame(k);
    FrameAccuracy fa;
    fa.t = t;
    fa.existing = static_cast<int>(contacts.size());
    for (NodeId i = 0; i < n; ++i) {
      for (NodeId j = i + 1; j < n; ++j) {
        const bool recorded = in_contact[static_cast<std::size_t>(i) * n + j];
        const bool within =
            inferred_mobility.geometry().distance(frame[i], frame[j]) <= range;
        if (recorded && !within) ++fa.missed;
        if (!recorded && within) ++fa.added;
      }
    }
    for (const NodePair& p : contacts) {
      in_contact[static_cast<std::size_t>(p.a) * n + p.b] = 0;
    }

    if (fa.existing > 0) {
      fa.missed_pct = 100.0 * fa.missed / fa.existing;
      fa.added_pct = 100.0 * fa.added / fa.existing;
      missed_sum += fa.missed_pct;
      added_sum += fa.added_pct;
      ++out.frames_counted;
    } else {
      fa.missed_pct = std::numeric_limits<double>::quiet_NaN();
      fa.added_pct = std::numeric_limits<double>::quiet_NaN();
    }
    out.frames.push_back(fa);
  }

  if (out.frames_counted > 0) {
    out.mean_missed_pct = missed_sum / out.frames_counted;
    out.mean_added_pct = added_sum / out.frames_counted;
  }
  return out;
}

std::vector<double> inter_contact_times(const ContactTrace& trace) {
  std::vector<double> gaps;
  for (const PairSchedule& s : trace.pair_schedules()) {
    for (std::size_t k = 1; k < s.intervals.size(); ++k) {
      gaps.push_back(s.intervals[k].t_start - s.intervals[k - 1].t_end);
    }
  }
  return gaps;
}

std::vector<CcdfPoint> ccdf(std::span<const double> samples) {
  if (samples.empty()) {
    throw std::domain_error("ccdf of an empty sample set is undefined");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double total = static_cast<double>(sorted.size());
  std::vector<CcdfPoint> out;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    out.push_back({sorted[i], static_cast<double>(sorted.size() - i) / total});
    i = j;
  }
  return out;
}

EvaluationReport evaluate(const std::optional<MovementTrace>& original_mobility,
                          const ContactTrace& original_contacts,
                          const MovementTrace& inferred_mobility,
                          double range) {
  EvaluationReport report;

  const MovementTrace* eval_trace = &inferred_mobility;
  std::optional<MovementTrace> resampled;
  if (original_mobility &&
      original_mobility->dt() != inferred_mobility.dt()) {
    resampled = resample(inferred_mobility, original_mobility->dt());
    eval_trace = &*resampled;
  }
  report.eval_dt = eval_trace->dt();

  if (original_mobility) {
    report.pearson_correlation =
        pairwise_distance_correlation(*original_mobility, *eval_trace);
  }
  report.accuracy = contact_accuracy(original_contacts, *eval_trace, range);
  report.ict_original = inter_contact_times(original_contacts);
  report.ict_inferred = inter_contact_times(
      extract_contacts(*eval_trace, range, eval_trace->dt()));
  return report;
}

void write_accuracy_csv(std::ostream& out, const ContactAccuracy& accuracy) {
  std::string buf = "t,existing,missed,added,missed_pct,added_pct\n";
  for (const FrameAccuracy& f : accuracy.frames) {
    append_double(buf, f.t);
    buf += ',';
    buf += std::to_string(f.existing);
    buf += ',';
    buf += std::to_string(f.missed);
    buf += ',';
    buf += std::to_string(f.added);
    buf += ',';
    if (std::isnan(f.missed_pct)) {
      buf += "nan,nan";
    } else {
      append_double(buf, f.missed_pct);
      buf += ',';
      append_double(buf, f.added_pct);
    }
    buf += '\n';
  }
  out << buf;
}

void write_ccdf_csv(std::ostream& out, std::span<const CcdfPoint> points) {
  std::string buf = "value,survival\n";
  for (const CcdfPoint& p : points) {
    append_double(buf, p.value);
    buf += ',';
    append_double(buf, p.survival);
    buf += '\n';
  }
  out << buf;
}

}  // namespace mobinfer
