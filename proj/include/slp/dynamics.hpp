#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "slp/params.hpp"
#include "slp/sequence.hpp"
#include "slp/trace.hpp"

namespace slp::dynamics {

using Complex = std::complex<double>;
using CArray = std::vector<Complex>;

struct Grid {
  int n_z = 256;
  double length = 10e-3;    // m
  double dt = 1e-9;         // s
  double sample_dt = 10e-9; // trace sampling interval, s

  double dz() const { return length / (n_z - 1); }
  void validate() const;  // n_z >= 16, positive steps
};

struct ChannelParams {
  int id = 1;
  double od_eff = 60.0;   // per-channel optical depth
  double overlap = 1.0;   // multiplies both control Rabi frequencies
  double angle = 0.0;     // injection angle tag, rad
  double delta_k_l = 0.0; // per-channel dimensionless mismatch

  void validate() const;
};

enum class SolverKind {
  // Optical coherences eliminated adiabatically; spin wave advanced with RK4.
  Adiabatic,
  // Retains d/dt p+- (needs a smaller dt); used as the stiff reference.
  FullCoherence,
};

// Per-channel 1-D state: field envelopes, coherences, shared spin wave.
struct SimState {
  CArray e_plus, e_minus;  // normalized field envelopes over z
  CArray p_plus, p_minus;  // optical coherences per probe direction
  CArray spin;             // collective spin wave
  double t = 0;
  LedgerSample ledger;

  explicit SimState(int n_z)
      : e_plus(n_z), e_minus(n_z), p_plus(n_z), p_minus(n_z), spin(n_z) {}
};

// Raised on NaN/Inf in any state array; names the array and time.
struct NumericalBlowup : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Integrates one channel of the 1-D slowly-varying-envelope system:
//   dz e+  = +i k p+,                dz e-  = -i k p-        (quasi-static)
//   dt p+- = -(Gamma/2 + i d+-) p+- + i k c0 e+- + i W+-(t) S_phase
//   dt S   = -gamma_s S + i W_f* p+ + i W_b* p- exp(-i dk z)
// with k = sqrt(g_n)/c0, the backward drive carrying exp(+i dk z), d+ = 0 and
// d- = Delta. The stationary eigenmode is the dark-state polariton with
// v_g = c0 cos^2(theta) cos(2 phi).
class ChannelSimulator {
 public:
  ChannelSimulator(const params::EnsembleParams& ensemble,
                   const ChannelParams& channel,
                   const sequence::CompiledSequence& seq, const Grid& grid,
                   double delta, double c0, SolverKind solver);

  // Advances by grid.dt, re-solves the fields, updates the ledger.
  void step();

  const SimState& state() const { return state_; }
  SimState& mutable_state() { return state_; }

  // Current boundary / loss observables.
  double drive_amplitude(double t) const;
  double out_fwd() const;  // |e+(L)|^2
  double out_bwd() const;  // |e-(0)|^2
  double stored_excitation() const;
  double centroid() const;  // excitation-density centroid position, m

  // Recomputes fields (and, in adiabatic mode, coherences) from the spin wave
  // at the state's current time. Public so initial conditions can be applied.
  void refresh_slaved_fields();

  const Grid& grid() const { return grid_; }

 private:
  struct Rates {
    double influx, outflux_fwd, outflux_bwd, diss_e, diss_s;
  };

  void solve_fields(const CArray& p_plus, const CArray& p_minus, CArray& e_plus,
                    CArray& e_minus, double t) const;
  void adiabatic_coherences(const CArray& spin, const CArray& e_plus,
                            const CArray& e_minus, double t, CArray& p_plus,
                            CArray& p_minus) const;
  void spin_rhs(const CArray& spin, double t, CArray& out, CArray& e_plus,
                CArray& e_minus, CArray& p_plus, CArray& p_minus) const;
  void full_rhs(const CArray& p_plus, const CArray& p_minus,
                const CArray& spin, double t, CArray& dp_plus,
                CArray& dp_minus, CArray& dspin, CArray& e_plus,
                CArray& e_minus) const;
  Rates rates_now() const;
  void check_finite() const;

  params::EnsembleParams ensemble_;
  ChannelParams channel_;
  const sequence::CompiledSequence* seq_;
  Grid grid_;
  SolverKind solver_;
  double gamma_e_, gamma_s_, c0_;
  double g_n_;       // channel-effective collective coupling (internal)
  double sqrt_gn_;
  Complex d_plus_, d_minus_;  // Gamma/2 + i*delta for each probe direction
  std::vector<Complex> phase_fwd_;  // exp(+i dk z)
  std::vector<Complex> phase_bwd_;  // exp(-i dk z)
  std::vector<double> z_;
  Rates prev_rates_;
  bool have_prev_rates_ = false;
  SimState state_;
};

struct RunOptions {
  SolverKind solver = SolverKind::Adiabatic;
  // Optional initial spin-wave profile (applied at t = 0), indexed by z.
  std::optional<std::vector<Complex>> initial_spin;
  // Channels the initial spin applies to (empty = all).
  std::vector<int> initial_spin_channels;
};

// Simulates every channel independently under the shared control timeline and
// returns traces at both medium ends plus the ledger history.
TraceSet run(const sequence::CompiledSequence& seq,
             const params::EnsembleParams& ensemble,
             const std::vector<ChannelParams>& channels, const Grid& grid,
             double delta, double c0, const RunOptions& options = {});

// Least-squares slope of the excitation centroid over [t0, t1]. Throws
// std::domain_error when the excitation inside the window stays below
// `threshold` (undefined measurement).
double centroid_velocity(const std::vector<double>& t,
                         const std::vector<double>& centroid,
                         const std::vector<double>& excitation, double t0,
                         double t1, double threshold);

}  // namespace slp::dynamics
