#pragma once

#include <string>
#include <utility>
#include <vector>

#include "slp/params.hpp"
#include "slp/trace.hpp"

namespace slp::analysis {

// Trapezoidal integral of intensity over [t0, t1] (window edges interpolated
// linearly). Throws std::invalid_argument on an inverted window or one
// outside the trace span.
double pulse_energy(const Trace& trace, double t0, double t1);

// Ratio of output pulse energy over [out_t0, out_t1] to input energy over
// [in_t0, in_t1]. Throws std::domain_error when the reference energy is zero.
double efficiency(const Trace& out, const Trace& ref_input, double out_t0,
                  double out_t1, double in_t0, double in_t1);

// Peak time with 3-point quadratic interpolation around the sample maximum,
// restricted to [t0, t1]. Throws std::domain_error when another local maximum
// within `ambiguity_ratio` of the dominant one exists away from it.
double peak_time(const Trace& trace, double t0, double t1,
                 double ambiguity_ratio = 0.8);

// Peak-time difference minus the storage time.
double group_delay(const Trace& out, const Trace& in_ref, double storage_time,
                   double out_t0, double out_t1);
double group_delay(const Trace& out, const Trace& in_ref, double storage_time);

struct DecayFit {
  double amplitude = 0;
  double tau = 0;       // s
  double residual = 0;  // RMS of the log-domain fit
};

// Least-squares fit of log(eta) = log(A) - t/tau. Needs >= 3 points with
// eta > 0 and non-degenerate times.
DecayFit fit_exponential(const std::vector<std::pair<double, double>>& points);

struct Report {
  double tau_diss = 0;       // s
  double fit_amplitude = 0;
  double fit_residual = 0;
  double f0 = 0;             // Hz
  double q = 0;
  double c_n = 0;            // N-atom cooperativity (0 when not derivable)
  double g_single = 0;       // rad/s
  double kappa = 0;          // rad/s
  double n_atoms = 0;

  std::string to_json() const;
  std::string to_table() const;
};

// Q = 2 pi f0 tau from the fit; C_N via the params module when the cavity
// analogy parameters carry g and kappa (N inferred from the quoted g^2 N and
// the cooperativity from the atomic decay rate gamma_e).
Report summarize(const DecayFit& fit, const params::PhysicalConstants& constants,
                 const params::CavityAnalogyParams& cavity,
                 double gn_quoted = 0.0, double gamma_e = 0.0);

}  // namespace slp::analysis
