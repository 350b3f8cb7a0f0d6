#pragma once

#include <string>
#include <vector>

namespace slp {

enum class TraceEnd { Forward, Backward, Input };

std::string trace_end_name(TraceEnd e);

// Detector-style intensity time series at one medium end of one channel.
struct Trace {
  std::vector<double> t;          // s, strictly increasing
  std::vector<double> intensity;  // normalized photon flux, >= 0
  int channel = 1;
  TraceEnd end = TraceEnd::Forward;

  void validate() const;
};

struct LedgerSample {
  double t = 0;
  double input_ex = 0;
  double emitted_fwd = 0;
  double emitted_bwd = 0;
  double dissipated_e = 0;
  double dissipated_s = 0;
  double stored = 0;

  double closure_error() const;  // relative bookkeeping residual
};

struct ChannelTraces {
  int channel = 1;
  Trace fwd, bwd, input;
  // Excitation-density centroid history (for centroid_velocity).
  std::vector<double> centroid_t;  // s
  std::vector<double> centroid_z;  // m
  std::vector<double> excitation;  // total atomic excitation at centroid_t
  std::vector<LedgerSample> ledger;
};

struct TraceSet {
  std::vector<ChannelTraces> channels;

  const ChannelTraces& channel(int id) const;
};

}  // namespace slp
