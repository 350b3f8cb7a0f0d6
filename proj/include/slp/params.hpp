#pragma once

#include <string>
#include <vector>

#include "slp/units.hpp"

namespace slp::params {

// All angular frequencies are stored in rad/s; SI units throughout.
// Parameter files carry explicit unit suffixes, converted at parse time.

struct PhysicalConstants {
  double c0 = kSpeedOfLight;  // m/s
  double lambda_p = 795e-9;   // probe wavelength, m
  double omega_hf = 0.0;      // ground hyperfine splitting, rad/s

  void validate() const;
  // Optical carrier frequency of the coupling field, rad/s.
  double carrier_omega() const { return kTwoPi * c0 / lambda_p; }
  // Resonant optical frequency, Hz.
  double f0() const { return c0 / lambda_p; }
};

struct EnsembleParams {
  double od = 0.0;       // resonant optical depth, intensity convention
  double length = 0.0;   // m
  double gamma_s = 0.0;  // ground-state coherence dephasing, rad/s
  double gamma_e = 0.0;  // excited-state decay rate, rad/s
  double g_n = 0.0;      // collective coupling g^2 N, internal convention, rad^2/s^2
  double n_atoms = 0.0;  // optional bookkeeping

  // Fills g_n from the OD convention: transmission of the bare two-level
  // medium is exp(-OD), hence g_n = od*c0*gamma_e/(4*length).
  static EnsembleParams from_od(double od, double length, double gamma_s,
                                double gamma_e, double c0 = kSpeedOfLight,
                                double n_atoms = 0.0);
  void validate(double c0 = kSpeedOfLight) const;
};

struct ControlParams {
  double omega_fwc = 0.0;   // FWC Rabi frequency (quoted convention), rad/s
  double omega_bwc = 0.0;   // BWC Rabi frequency, rad/s
  double delta = 0.0;       // FWC-BWC detuning, rad/s
  double ramp_time = 1e-7;  // control switching ramp, s

  void validate() const;
};

struct CavityAnalogyParams {
  double g_single = 0.0;  // single-atom coupling, rad/s
  double kappa = 0.0;     // effective linewidth, rad/s
  double q_factor = 0.0;
  double tau_diss = 0.0;  // s
  double f0 = 0.0;        // Hz
  double energy = 0.0;    // J, optional bookkeeping
  double power = 0.0;     // W, optional bookkeeping

  void validate() const;
};

// ---- Closed-form derived quantities (quoted-convention formulas) ----

// Omega_FWC = sqrt(od*gamma_e/tau_g); inputs must be positive.
double infer_rabi_from_delay(double od, double gamma_e, double tau_g);

// g^2 N = omega^2*(c0*tau_g/length - 1); requires subluminal tau_g.
double infer_gn_from_vg(double tau_g, double length, double omega, double c0);

// C_N = 4 g^2 N / (kappa*gamma_e).
double cooperativity(double g_single, double n_atoms, double kappa,
                     double gamma_e);

// Q = 2*pi*f0*tau.
double q_factor(double f0, double tau_diss);

// ---- Convention bridge ----
// The reference formulas above use full Rabi frequencies and the extinction
// law transmission = exp(-2*OD_quoted*...) implicit in tau_g = OD*Gamma/Omega^2.
// The solver's internal normalization uses half-Rabi amplitudes and
// g_n = od*c0*gamma_e/(4 L); the two agree when internal amplitudes are half
// the quoted ones (and internal g_n a quarter of the quoted g^2 N).
inline double internal_rabi(double omega_quoted) { return 0.5 * omega_quoted; }
inline double quoted_rabi(double omega_internal) { return 2.0 * omega_internal; }
inline double internal_gn(double gn_quoted) { return 0.25 * gn_quoted; }
inline double quoted_gn(double gn_internal) { return 4.0 * gn_internal; }

// ---- Parameter file ----

struct ChannelSpec {
  int id = 1;
  double od_eff = 0.0;   // per-channel optical depth
  double overlap = 1.0;  // coupling-field overlap factor in (0, 1]
};

struct ParameterSet {
  PhysicalConstants constants;
  EnsembleParams ensemble;
  ControlParams controls;
  CavityAnalogyParams cavity;
  double delta_k_l = 0.0;  // dimensionless residual mismatch override
  std::vector<ChannelSpec> channels;

  void validate() const;
};

// Flat key-value text format, one `key = value` per line, '#' comments.
// Unknown keys are an error. See data/rb87_d1.params for the full key list.
ParameterSet parse_parameter_text(const std::string& text);
ParameterSet load_parameter_file(const std::string& path);

// Reference defaults: 87Rb D1, OD 60, gamma_s = 2pi x 60 kHz, L = 10 mm.
ParameterSet default_rb87();

}  // namespace slp::params
