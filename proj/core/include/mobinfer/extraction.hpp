#pragma once

#include "mobinfer/contact_trace.hpp"
#include "mobinfer/movement_trace.hpp"

namespace mobinfer {

// Proximity sampling: positions are sampled every `period` seconds
// (synchronized across all pairs); a pair within `range` at sample time k*P
// is in contact over [k*P, (k+1)*P), and consecutive in-range samples merge
// into one event. period must be a positive integer multiple of the trace
// timestep. Distances use the trace's own geometry.
//
// Sample times are the k*P that fall strictly inside [0, duration), with a
// single sample at t=0 when duration <= period; the returned trace's
// duration is sample_count * period, covering the last assumed-full period.
ContactTrace extract_contacts(const MovementTrace& trace, double range,
                              double period);

}  // namespace mobinfer
