#pragma once

#include <map>
#include <string>
#include <vector>

#include "slp/analysis.hpp"
#include "slp/dynamics.hpp"
#include "slp/params.hpp"
#include "slp/sequence.hpp"

namespace slp::scenario {

// Built-in deterministic scenarios; no hand-written files needed.
//   fig3-eit       EIT storage and retrieval
//   fig3-slp       EIT storage + 1 us stationary-light trapping
//   trap-2us       fig3-slp with a 2 us trapping window
//   slow-light     constant FWC, probe transit only
//   fig4-sweep     trapping time 0.8..2.0 us in 0.2 us steps + decay fit
//   storage-decay  spin-wave storage sweep, decay-rate check against 2*gamma_s
std::vector<std::string> names();
bool is_known(const std::string& name);
bool is_sweep(const std::string& name);

// Timeline for the non-sweep scenarios (and the sweep base for fig4-sweep).
sequence::Timeline builtin_timeline(const std::string& name);

// Event landmarks used for analysis windows, taken from the timeline.
struct Windows {
  double probe_center = 0;
  double fwc_off = 0;
  double fwc_on = 0;     // retrieval start (0 when FWC never switches)
  double bwc_on = 0;     // 0 when no BWC pulse
  double bwc_off = 0;    // 0 when no BWC pulse
  double storage_time = 0;
  double duration = 0;
};
Windows derive_windows(const sequence::Timeline& t);

std::vector<dynamics::ChannelParams> channels_from(
    const params::ParameterSet& p);

TraceSet run_timeline(const sequence::Timeline& timeline,
                      const params::ParameterSet& p,
                      const dynamics::Grid& grid,
                      dynamics::SolverKind solver = dynamics::SolverKind::Adiabatic);

struct SweepResult {
  std::vector<double> trap_times;  // s
  // release efficiency per channel, one entry per trap time
  std::map<int, std::vector<double>> efficiencies;
  std::map<int, analysis::DecayFit> fits;
  analysis::Report report;  // from the channel-averaged fit
  std::vector<TraceSet> runs;
};

// Seven trapping times, release-efficiency decay fit, Q-factor and
// cooperativity summary.
SweepResult run_fig4_sweep(const params::ParameterSet& p,
                           const dynamics::Grid& grid,
                           dynamics::SolverKind solver =
                               dynamics::SolverKind::Adiabatic);

struct StorageDecayResult {
  std::vector<double> storage_times;   // s
  std::vector<double> efficiencies;    // retrieved energy / stored excitation
  analysis::DecayFit fit;
  double expected_rate = 0;            // 2*gamma_s
};

// Idealized compressed spin wave stored for a sweep of times, then retrieved;
// the fitted decay rate should reproduce 2*gamma_s.
StorageDecayResult run_storage_decay(const params::ParameterSet& p,
                                     const dynamics::Grid& grid,
                                     dynamics::SolverKind solver =
                                         dynamics::SolverKind::Adiabatic);

}  // namespace slp::scenario
