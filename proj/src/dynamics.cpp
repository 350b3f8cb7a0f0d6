#include "slp/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace slp::dynamics {

namespace {

constexpr Complex kI{0.0, 1.0};

double trapz_abs2(const CArray& a, double dz) {
  double sum = 0;
  for (size_t j = 0; j < a.size(); ++j) {
    const double w = (j == 0 || j + 1 == a.size()) ? 0.5 : 1.0;
    sum += w * std::norm(a[j]);
  }
  return sum * dz;
}

}  // namespace

void Grid::validate() const {
  if (n_z < 16) throw std::invalid_argument("grid: n_z must be >= 16");
  if (!(length > 0)) throw std::invalid_argument("grid: length must be positive");
  if (!(dt > 0)) throw std::invalid_argument("grid: dt must be positive");
  if (!(sample_dt >= dt)) {
    throw std::invalid_argument("grid: sample_dt must be >= dt");
  }
}

void ChannelParams::validate() const {
  if (!(od_eff > 0)) throw std::invalid_argument("channel: od_eff must be positive");
  if (!(overlap > 0) || overlap > 1.0) {
    throw std::invalid_argument("channel: overlap must be in (0, 1]");
  }
  if (delta_k_l < 0) throw std::invalid_argument("channel: delta_k_l must be >= 0");
}

ChannelSimulator::ChannelSimulator(const params::EnsembleParams& ensemble,
                                   const ChannelParams& channel,
                                   const sequence::CompiledSequence& seq,
                                   const Grid& grid, double delta, double c0,
                                   SolverKind solver)
    : ensemble_(ensemble),
      channel_(channel),
      seq_(&seq),
      grid_(grid),
      solver_(solver),
      gamma_e_(ensemble.gamma_e),
      gamma_s_(ensemble.gamma_s),
      c0_(c0),
      state_(grid.n_z) {
  grid_.validate();
  channel_.validate();

  g_n_ = channel_.od_eff * c0_ * gamma_e_ / (4.0 * ensemble_.length);
  sqrt_gn_ = std::sqrt(g_n_);
  d_plus_ = Complex(0.5 * gamma_e_, 0.0);
  d_minus_ = Complex(0.5 * gamma_e_, delta);

  const double dk = channel_.delta_k_l / ensemble_.length;
  z_.resize(grid_.n_z);
  phase_fwd_.resize(grid_.n_z);
  phase_bwd_.resize(grid_.n_z);
  for (int j = 0; j < grid_.n_z; ++j) {
    z_[j] = j * grid_.dz();
    phase_fwd_[j] = std::exp(kI * (dk * z_[j]));
    phase_bwd_[j] = std::conj(phase_fwd_[j]);
  }

  // Stability bound: dt <= min(0.05/Gamma_eff, 0.01*tau_pulse).
  const double omega_max =
      channel_.overlap * std::max(seq.fwc.nominal(), seq.bwc.nominal());
  double gamma_eff;
  if (solver_ == SolverKind::Adiabatic) {
    gamma_eff = gamma_s_ + 2.0 * omega_max * omega_max *
                               std::abs(Complex(1.0, 0.0) / d_plus_) +
                2.0 * omega_max * omega_max *
                    std::abs(Complex(1.0, 0.0) / d_minus_);
  } else {
    gamma_eff = 0.5 * gamma_e_ + std::abs(delta) + omega_max;
  }
  double dt_max = gamma_eff > 0 ? 0.05 / gamma_eff
                                : std::numeric_limits<double>::infinity();
  for (const auto& p : seq.probes) dt_max = std::min(dt_max, 0.01 * p.fwhm);
  if (grid_.dt > dt_max) {
    throw std::invalid_argument(
        "grid: dt violates the stability bound (needs dt <= " +
        std::to_string(dt_max) + " s)");
  }
}

double ChannelSimulator::drive_amplitude(double t) const {
  return seq_->probe_amplitude(channel_.id, t);
}

void ChannelSimulator::solve_fields(const CArray& p_plus, const CArray& p_minus,
                                    CArray& e_plus, CArray& e_minus,
                                    double t) const {
  const int n = grid_.n_z;
  const double dz = grid_.dz();
  const Complex coef = kI * (sqrt_gn_ * dz / (2.0 * c0_));

  e_plus[0] = Complex(drive_amplitude(t), 0.0);
  for (int j = 0; j + 1 < n; ++j) {
    e_plus[j + 1] = e_plus[j] + coef * (p_plus[j] + p_plus[j + 1]);
  }
  e_minus[n - 1] = Complex(0.0, 0.0);
  for (int j = n - 2; j >= 0; --j) {
    e_minus[j] = e_minus[j + 1] + coef * (p_minus[j] + p_minus[j + 1]);
  }
}

void ChannelSimulator::adiabatic_coherences(const CArray& spin,
                                            const CArray& e_plus,
                                            const CArray& e_minus, double t,
                                            CArray& p_plus,
                                            CArray& p_minus) const {
  const double wf = channel_.overlap * (*seq_).fwc(t);
  const double wb = channel_.overlap * (*seq_).bwc(t);
  const int n = grid_.n_z;
  for (int j = 0; j < n; ++j) {
    p_plus[j] = kI * (sqrt_gn_ * e_plus[j] + wf * spin[j]) / d_plus_;
    p_minus[j] =
        kI * (sqrt_gn_ * e_minus[j] + wb * spin[j] * phase_fwd_[j]) / d_minus_;
  }
}

void ChannelSimulator::spin_rhs(const CArray& spin, double t, CArray& out,
                                CArray& e_plus, CArray& e_minus,
                                CArray& p_plus, CArray& p_minus) const {
  const double wf = channel_.overlap * (*seq_).fwc(t);
  const double wb = channel_.overlap * (*seq_).bwc(t);
  const int n = grid_.n_z;
  const double dz = grid_.dz();

  // With the coherences eliminated, the field transport becomes
  //   dz e+ = -a+ e+ - b+ S,   dz e- = +a- e- + b- S exp(+i dk z)
  // integrated by Crank-Nicolson from the driven boundary.
  const Complex a_p = g_n_ / (c0_ * d_plus_);
  const Complex b_p = sqrt_gn_ * wf / (c0_ * d_plus_);
  const Complex a_m = g_n_ / (c0_ * d_minus_);
  const Complex b_m = sqrt_gn_ * wb / (c0_ * d_minus_);

  e_plus[0] = Complex(drive_amplitude(t), 0.0);
  const Complex denom_p = 1.0 + a_p * (dz / 2.0);
  const Complex numer_p = 1.0 - a_p * (dz / 2.0);
  for (int j = 0; j + 1 < n; ++j) {
    e_plus[j + 1] = (e_plus[j] * numer_p -
                     (dz / 2.0) * b_p * (spin[j] + spin[j + 1])) /
                    denom_p;
  }
  e_minus[n - 1] = Complex(0.0, 0.0);
  const Complex denom_m = 1.0 + a_m * (dz / 2.0);
  const Complex numer_m = 1.0 - a_m * (dz / 2.0);
  for (int j = n - 2; j >= 0; --j) {
    e_minus[j] = (e_minus[j + 1] * numer_m -
                  (dz / 2.0) * b_m *
                      (spin[j] * phase_fwd_[j] + spin[j + 1] * phase_fwd_[j + 1])) /
                 denom_m;
  }

  adiabatic_coherences(spin, e_plus, e_minus, t, p_plus, p_minus);
  for (int j = 0; j < n; ++j) {
    out[j] = -gamma_s_ * spin[j] + kI * wf * p_plus[j] +
             kI * wb * p_minus[j] * phase_bwd_[j];
  }
}

void ChannelSimulator::full_rhs(const CArray& p_plus, const CArray& p_minus,
                                const CArray& spin, double t, CArray& dp_plus,
                                CArray& dp_minus, CArray& dspin,
                                CArray& e_plus, CArray& e_minus) const {
  const double wf = channel_.overlap * (*seq_).fwc(t);
  const double wb = channel_.overlap * (*seq_).bwc(t);
  const int n = grid_.n_z;
  solve_fields(p_plus, p_minus, e_plus, e_minus, t);
  for (int j = 0; j < n; ++j) {
    dp_plus[j] = -d_plus_ * p_plus[j] + kI * sqrt_gn_ * e_plus[j] +
                 kI * wf * spin[j];
    dp_minus[j] = -d_minus_ * p_minus[j] + kI * sqrt_gn_ * e_minus[j] +
                  kI * wb * spin[j] * phase_fwd_[j];
    dspin[j] = -gamma_s_ * spin[j] + kI * wf * p_plus[j] +
               kI * wb * p_minus[j] * phase_bwd_[j];
  }
}

void ChannelSimulator::refresh_slaved_fields() {
  if (solver_ == SolverKind::Adiabatic) {
    // A dummy RHS evaluation refreshes e+- and p+- consistently with spin.
    CArray tmp(grid_.n_z);
    spin_rhs(state_.spin, state_.t, tmp, state_.e_plus, state_.e_minus,
             state_.p_plus, state_.p_minus);
  } else {
    solve_fields(state_.p_plus, state_.p_minus, state_.e_plus, state_.e_minus,
                 state_.t);
  }
}

ChannelSimulator::Rates ChannelSimulator::rates_now() const {
  const double dz = grid_.dz();
  Rates r;
  const double drive = drive_amplitude(state_.t);
  r.influx = c0_ * drive * drive;
  r.outflux_fwd = c0_ * std::norm(state_.e_plus.back());
  r.outflux_bwd = c0_ * std::norm(state_.e_minus.front());
  r.diss_e = gamma_e_ * (trapz_abs2(state_.p_plus, dz) +
                         trapz_abs2(state_.p_minus, dz));
  r.diss_s = 2.0 * gamma_s_ * trapz_abs2(state_.spin, dz);
  return r;
}

double ChannelSimulator::out_fwd() const {
  return std::norm(state_.e_plus.back());
}

double ChannelSimulator::out_bwd() const {
  return std::norm(state_.e_minus.front());
}

double ChannelSimulator::stored_excitation() const {
  const double dz = grid_.dz();
  return trapz_abs2(state_.spin, dz) + trapz_abs2(state_.p_plus, dz) +
         trapz_abs2(state_.p_minus, dz);
}

double ChannelSimulator::centroid() const {
  const double dz = grid_.dz();
  double num = 0, den = 0;
  for (int j = 0; j < grid_.n_z; ++j) {
    const double w = (j == 0 || j + 1 == grid_.n_z) ? 0.5 : 1.0;
    const double u = w * (std::norm(state_.spin[j]) +
                          std::norm(state_.p_plus[j]) +
                          std::norm(state_.p_minus[j]));
    num += u * z_[j];
    den += u;
  }
  if (den <= 0) return 0.5 * grid_.length;
  return num / den;
}

void ChannelSimulator::check_finite() const {
  const auto scan = [&](const CArray& a, const char* name) {
    for (const auto& v : a) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw NumericalBlowup(std::string("numerical blow-up in ") + name +
                              " at t = " + std::to_string(state_.t * 1e6) +
                              " us (channel " + std::to_string(channel_.id) +
                              ")");
      }
    }
  };
  scan(state_.e_plus, "e_plus");
  scan(state_.e_minus, "e_minus");
  scan(state_.p_plus, "p_plus");
  scan(state_.p_minus, "p_minus");
  scan(state_.spin, "spin");
}

void ChannelSimulator::step() {
  const int n = grid_.n_z;
  const double dt = grid_.dt;
  const double t = state_.t;

  if (!have_prev_rates_) {
    refresh_slaved_fields();
    prev_rates_ = rates_now();
    have_prev_rates_ = true;
  }

  if (solver_ == SolverKind::Adiabatic) {
    static thread_local CArray k1, k2, k3, k4, tmp, ep, em, pp, pm;
    for (CArray* a : {&k1, &k2, &k3, &k4, &tmp, &ep, &em, &pp, &pm}) {
      a->assign(n, Complex{});
    }
    spin_rhs(state_.spin, t, k1, ep, em, pp, pm);
    for (int j = 0; j < n; ++j) tmp[j] = state_.spin[j] + (dt / 2.0) * k1[j];
    spin_rhs(tmp, t + dt / 2.0, k2, ep, em, pp, pm);
    for (int j = 0; j < n; ++j) tmp[j] = state_.spin[j] + (dt / 2.0) * k2[j];
    spin_rhs(tmp, t + dt / 2.0, k3, ep, em, pp, pm);
    for (int j = 0; j < n; ++j) tmp[j] = state_.spin[j] + dt * k3[j];
    spin_rhs(tmp, t + dt, k4, ep, em, pp, pm);
    for (int j = 0; j < n; ++j) {
      state_.spin[j] +=
          (dt / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
  } else {
    static thread_local CArray kp1, km1, ks1, kp2, km2, ks2, kp3, km3, ks3,
        kp4, km4, ks4, tp, tm, ts, ep, em;
    for (CArray* a : {&kp1, &km1, &ks1, &kp2, &km2, &ks2, &kp3, &km3, &ks3,
                      &kp4, &km4, &ks4, &tp, &tm, &ts, &ep, &em}) {
      a->assign(n, Complex{});
    }
    full_rhs(state_.p_plus, state_.p_minus, state_.spin, t, kp1, km1, ks1, ep, em);
    for (int j = 0; j < n; ++j) {
      tp[j] = state_.p_plus[j] + (dt / 2.0) * kp1[j];
      tm[j] = state_.p_minus[j] + (dt / 2.0) * km1[j];
      ts[j] = state_.spin[j] + (dt / 2.0) * ks1[j];
    }
    full_rhs(tp, tm, ts, t + dt / 2.0, kp2, km2, ks2, ep, em);
    for (int j = 0; j < n; ++j) {
      tp[j] = state_.p_plus[j] + (dt / 2.0) * kp2[j];
      tm[j] = state_.p_minus[j] + (dt / 2.0) * km2[j];
      ts[j] = state_.spin[j] + (dt / 2.0) * ks2[j];
    }
    full_rhs(tp, tm, ts, t + dt / 2.0, kp3, km3, ks3, ep, em);
    for (int j = 0; j < n; ++j) {
      tp[j] = state_.p_plus[j] + dt * kp3[j];
      tm[j] = state_.p_minus[j] + dt * km3[j];
      ts[j] = state_.spin[j] + dt * ks3[j];
    }
    full_rhs(tp, tm, ts, t + dt, kp4, km4, ks4, ep, em);
    for (int j = 0; j < n; ++j) {
      state_.p_plus[j] +=
          (dt / 6.0) * (kp1[j] + 2.0 * kp2[j] + 2.0 * kp3[j] + kp4[j]);
      state_.p_minus[j] +=
          (dt / 6.0) * (km1[j] + 2.0 * km2[j] + 2.0 * km3[j] + km4[j]);
      state_.spin[j] +=
          (dt / 6.0) * (ks1[j] + 2.0 * ks2[j] + 2.0 * ks3[j] + ks4[j]);
    }
  }

  state_.t = t + dt;
  refresh_slaved_fields();
  check_finite();

  const Rates now = rates_now();
  auto& led = state_.ledger;
  led.t = state_.t;
  led.input_ex += 0.5 * dt * (prev_rates_.influx + now.influx);
  led.emitted_fwd += 0.5 * dt * (prev_rates_.outflux_fwd + now.outflux_fwd);
  led.emitted_bwd += 0.5 * dt * (prev_rates_.outflux_bwd + now.outflux_bwd);
  led.dissipated_e += 0.5 * dt * (prev_rates_.diss_e + now.diss_e);
  led.dissipated_s += 0.5 * dt * (prev_rates_.diss_s + now.diss_s);
  led.stored = stored_excitation();
  prev_rates_ = now;
}

TraceSet run(const sequence::CompiledSequence& seq,
             const params::EnsembleParams& ensemble,
             const std::vector<ChannelParams>& channels, const Grid& grid,
             double delta, double c0, const RunOptions& options) {
  grid.validate();
  if (channels.empty()) throw std::invalid_argument("run: no channels");
  for (const auto& p : seq.probes) {
    const bool known = std::any_of(channels.begin(), channels.end(),
                                   [&](const ChannelParams& c) {
                                     return c.id == p.channel;
                                   });
    if (!known) {
      throw std::invalid_argument("timeline references undefined channel " +
                                  std::to_string(p.channel));
    }
  }

  TraceSet out;
  const long n_steps = std::lround(seq.duration / grid.dt);
  const long sample_every = std::max(1L, std::lround(grid.sample_dt / grid.dt));

  for (const auto& ch : channels) {
    ChannelSimulator sim(ensemble, ch, seq, grid, delta, c0, options.solver);

    const bool wants_spin =
        options.initial_spin &&
        (options.initial_spin_channels.empty() ||
         std::find(options.initial_spin_channels.begin(),
                   options.initial_spin_channels.end(),
                   ch.id) != options.initial_spin_channels.end());
    if (wants_spin) {
      auto& st = sim.mutable_state();
      if (options.initial_spin->size() != st.spin.size()) {
        throw std::invalid_argument("initial spin profile size != n_z");
      }
      st.spin = *options.initial_spin;
      sim.refresh_slaved_fields();
      st.ledger.input_ex = sim.stored_excitation();
      st.ledger.stored = st.ledger.input_ex;
    }

    ChannelTraces traces;
    traces.channel = ch.id;
    traces.fwd.channel = traces.bwd.channel = traces.input.channel = ch.id;
    traces.fwd.end = TraceEnd::Forward;
    traces.bwd.end = TraceEnd::Backward;
    traces.input.end = TraceEnd::Input;

    const auto sample = [&]() {
      const double t = sim.state().t;
      traces.fwd.t.push_back(t);
      traces.fwd.intensity.push_back(sim.out_fwd());
      traces.bwd.t.push_back(t);
      traces.bwd.intensity.push_back(sim.out_bwd());
      traces.input.t.push_back(t);
      const double d = sim.drive_amplitude(t);
      traces.input.intensity.push_back(d * d);
      traces.centroid_t.push_back(t);
      traces.centroid_z.push_back(sim.centroid());
      traces.excitation.push_back(sim.stored_excitation());
      traces.ledger.push_back(sim.state().ledger);
      traces.ledger.back().t = t;
    };

    sim.refresh_slaved_fields();
    sample();
    for (long s = 1; s <= n_steps; ++s) {
      sim.step();
      if (s % sample_every == 0 || s == n_steps) sample();
    }
    out.channels.push_back(std::move(traces));
  }
  return out;
}

double centroid_velocity(const std::vector<double>& t,
                         const std::vector<double>& centroid,
                         const std::vector<double>& excitation, double t0,
                         double t1, double threshold) {
  if (t.size() != centroid.size() || t.size() != excitation.size()) {
    throw std::invalid_argument("centroid_velocity: size mismatch");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  long n = 0;
  double max_exc = 0;
  for (size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t0 || t[i] > t1) continue;
    max_exc = std::max(max_exc, excitation[i]);
    sx += t[i];
    sy += centroid[i];
    sxx += t[i] * t[i];
    sxy += t[i] * centroid[i];
    ++n;
  }
  if (n < 2 || max_exc <= threshold) {
    throw std::domain_error(
        "centroid_velocity: excitation below threshold in window "
        "(undefined measurement)");
  }
  const double det = n * sxx - sx * sx;
  if (det == 0) throw std::domain_error("centroid_velocity: degenerate window");
  return (n * sxy - sx * sy) / det;
}

}  // namespace slp::dynamics
