#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "mobinfer/contact_trace.hpp"
#include "mobinfer/movement_trace.hpp"

namespace mobinfer {

// Pearson correlation pooled over every (unordered pair, frame) sample of
// pairwise distances, each trace measured in its own geometry. Traces must
// share node_count and dt; frames are truncated to the shorter trace.
// Throws std::domain_error when either distance series has zero variance.
double pairwise_distance_correlation(const MovementTrace& a,
                                     const MovementTrace& b);

struct FrameAccuracy {
  double t = 0.0;
  int existing = 0;  // contacts recorded in the original trace at t
  int missed = 0;    // recorded contacts whose inferred distance exceeds r
  int added = 0;     // unrecorded pairs within r in the inferred mobility
  // missed/existing and added/existing as percentages; NaN when existing == 0.
  double missed_pct = 0.0;
  double added_pct = 0.0;
};

struct ContactAccuracy {
  std::vector<FrameAccuracy> frames;
  // Means over frames with at least one existing contact.
  double mean_missed_pct = 0.0;
  double mean_added_pct = 0.0;
  int frames_counted = 0;
};

// Per-frame missed/added contact percentages of an inferred mobility against
// the original contact trace, evaluated at every inferred frame that falls
// inside the contact trace's duration.
ContactAccuracy contact_accuracy(const ContactTrace& original,
                                 const MovementTrace& inferred_mobility,
                                 double range);

// All gaps between consecutive contacts of the same pair (next t_start minus
// previous t_end); pairs with fewer than two events contribute nothing.
std::vector<double> inter_contact_times(const ContactTrace& trace);

struct CcdfPoint {
  double value = 0.0;
  double survival = 0.0;  // fraction of samples >= value
};

// Sorted distinct sample values with survival fractions, suitable for
// log-log export. Throws std::domain_error on empty input.
std::vector<CcdfPoint> ccdf(std::span<const double> samples);

struct EvaluationReport {
  // Absent when no original mobility is available (real traces).
  std::optional<double> pearson_correlation;
  ContactAccuracy accuracy;
  std::vector<double> ict_original;
  std::vector<double> ict_inferred;
  double eval_dt = 0.0;  // grid the accuracy series was computed on
};

// The full original-vs-inferred comparison. When the original mobility is
// present the inferred trace is resampled onto its timestep first (the
// timestep ratio must be an integer); the accuracy series then uses that
// grid. The inferred side's inter-contact times come from re-extracting
// contacts at the evaluation timestep.
EvaluationReport evaluate(const std::optional<MovementTrace>& original_mobility,
                          const ContactTrace& original_contacts,
                          const MovementTrace& inferred_mobility, double range);

// Two-column CSV `t,missed_pct,added_pct` (nan where no contacts exist).
void write_accuracy_csv(std::ostream& out, const ContactAccuracy& accuracy);
// Two-column CSV `value,survival`.
void write_ccdf_csv(std::ostream& out, std::span<const CcdfPoint> points);

}  // namespace mobinfer
