#include "mobinfer/extraction.hpp"

#include <cmath>
#include <utility>
#include <vector>

#include "mobinfer/num_format.hpp"

namespace mobinfer {

ContactTrace extract_contacts(const MovementTrace& trace, double range,
                              double period) {
  if (!(range >= 0.0)) throw ConfigError("range must be non-negative");
  if (!(period > 0.0)) throw ConfigError("period must be positive");
  const double ratio = period / trace.dt();
  const long stride = std::lround(ratio);
  if (stride < 1 || std::abs(ratio - static_cast<double>(stride)) > 1e-9) {
    throw ConfigError("period " + format_double(period) +
                      " is not an integer multiple of trace dt " +
                      format_double(trace.dt()));
  }

  const int n = trace.node_count();
  const double duration = trace.duration();
  int samples = static_cast<int>(std::ceil(duration / period - 1e-9));
  if (samples < 1) samples = 1;  // a single-sample trace still has one scan

  // run_start[p] is the first in-range sample of the current contact run of
  // pair p (triangular index), or -1 when the pair is out of range.
  const std::size_t pair_count = static_cast<std::size_t>(n) * (n - 1) / 2;
  std::vector<int> run_start(pair_count, -1);
  std::vector<ContactEvent> events;

  auto flush = [&](NodeId a, NodeId b, int first, int last_exclusive) {
    events.push_back({a, b, first * period, last_exclusive * period});
  };

  for (int k = 0; k < samples; ++k) {
    auto frame = trace.frame(static_cast<int>(k * stride));
    std::size_t p = 0;
    for (NodeId a = 0; a < n; ++a) {
      for (NodeId b = a + 1; b < n; ++b, ++p) {
        const bool in_range =
            trace.geometry().distance(frame[a], frame[b]) <= range;
        if (in_range && run_start[p] < 0) {
          run_start[p] = k;
        } else if (!in_range && run_start[p] >= 0) {
          flush(a, b, run_start[p], k);
          run_start[p] = -1;
        }
      }
    }
  }
  std::size_t p = 0;
  for (NodeId a = 0; a < n; ++a) {
    for (NodeId b = a + 1; b < n; ++b, ++p) {
      if (run_start[p] >= 0) flush(a, b, run_start[p], samples);
    }
  }

  return ContactTrace(n, samples * period, std::move(events));
}

}  // namespace mobinfer
