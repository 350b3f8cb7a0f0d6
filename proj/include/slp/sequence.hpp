#pragma once

#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "slp/params.hpp"

namespace slp::sequence {

enum class ControlField { FWC, BWC };

struct ProbePulse {
  int channel = 1;
  double t_center = 0;   // s
  double fwhm = 0;       // intensity FWHM, s
  double amplitude = 1;  // dimensionless boundary drive amplitude

  bool operator==(const ProbePulse&) const = default;
};

struct SetControl {
  ControlField field = ControlField::FWC;
  double level = 0;    // fraction of the nominal Rabi frequency, in [0, 1]
  double t_start = 0;  // s
  double ramp = 1e-7;  // raised-cosine ramp duration, s

  bool operator==(const SetControl&) const = default;
};

using Event = std::variant<ProbePulse, SetControl>;

double event_time(const Event& e);

struct Timeline {
  double duration = 0;  // s
  // Control levels before the first SetControl on each field.
  double init_fwc = 1.0;
  double init_bwc = 0.0;
  std::vector<Event> events;  // sorted by time

  bool operator==(const Timeline&) const = default;
};

struct ParseError : std::runtime_error {
  int line;
  ParseError(int line_, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line_) + ": " + msg),
        line(line_) {}
};

// Line-based format; see data/SEQUENCE_FORMAT.md. Throws ParseError with the
// offending line number on syntax errors, out-of-range events, or
// overlapping ramps on the same control.
Timeline parse_timeline(const std::string& text);

// Canonical text form; parse_timeline(print_timeline(t)) == t.
std::string print_timeline(const Timeline& t);

// --- Compiled form consumed by the dynamics module ---

struct ControlTransition {
  double t_start = 0;
  double ramp = 0;
  double from_level = 0;
  double to_level = 0;
};

class ControlWaveform {
 public:
  ControlWaveform(double nominal, double initial_level,
                  std::vector<ControlTransition> transitions);

  // Rabi frequency at time t, rad/s (internal half-Rabi convention).
  double operator()(double t) const;
  double level(double t) const;
  const std::vector<ControlTransition>& transitions() const {
    return transitions_;
  }
  double nominal() const { return nominal_; }

 private:
  double nominal_;
  double initial_level_;
  std::vector<ControlTransition> transitions_;
};

struct CompiledSequence {
  double duration = 0;
  ControlWaveform fwc;
  ControlWaveform bwc;
  std::vector<ProbePulse> probes;

  // Boundary drive amplitude for one channel (dimensionless; Gaussian pulses
  // truncated at +-3 amplitude sigma).
  double probe_amplitude(int channel, double t) const;
  std::vector<int> probe_channels() const;
};

// Converts the declarative timeline into continuous waveforms. The nominal
// Rabi frequencies are taken from `controls` (quoted convention) and
// converted to the internal half-Rabi amplitudes.
CompiledSequence compile(const Timeline& t, const params::ControlParams& controls);

// Trap-time family: clones `base` moving its final BWC turn-off so the
// both-beams-on window lasts `trap_time`; everything else is untouched.
Timeline with_trap_time(const Timeline& base, double trap_time);
std::vector<Timeline> trap_time_sweep(const Timeline& base,
                                      const std::vector<double>& trap_times);

}  // namespace slp::sequence
