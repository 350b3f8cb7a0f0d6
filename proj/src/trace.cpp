#include "slp/trace.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace slp {

std::string trace_end_name(TraceEnd e) {
  switch (e) {
    case TraceEnd::Forward: return "fwd";
    case TraceEnd::Backward: return "bwd";
    case TraceEnd::Input: return "in";
  }
  throw std::logic_error("bad TraceEnd");
}

void Trace::validate() const {
  if (t.size() != intensity.size()) {
    throw std::invalid_argument("trace: t/intensity size mismatch");
  }
  for (size_t i = 0; i < t.size(); ++i) {
    if (i > 0 && !(t[i] > t[i - 1])) {
      throw std::invalid_argument("trace: t must be strictly increasing");
    }
    if (!(intensity[i] >= 0) || !std::isfinite(intensity[i])) {
      throw std::invalid_argument("trace: intensity must be finite and >= 0");
    }
  }
}

double LedgerSample::closure_error() const {
  const double accounted =
      emitted_fwd + emitted_bwd + dissipated_e + dissipated_s + stored;
  const double scale = std::max(input_ex, accounted);
  if (scale <= 0) return 0.0;
  return std::abs(input_ex - accounted) / scale;
}

const ChannelTraces& TraceSet::channel(int id) const {
  const auto it = std::find_if(channels.begin(), channels.end(),
                               [&](const ChannelTraces& c) {
                                 return c.channel == id;
                               });
  if (it == channels.end()) {
    throw std::invalid_argument("no such channel in trace set: " +
                                std::to_string(id));
  }
  return *it;
}

}  // namespace slp
