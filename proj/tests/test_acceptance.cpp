// Acceptance gate: one pass/fail line per criterion, tolerances pinned below.
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "slp/analysis.hpp"
#include "slp/dynamics.hpp"
#include "slp/geometry.hpp"
#include "slp/params.hpp"
#include "slp/polariton.hpp"
#include "slp/scenario.hpp"
#include "slp/sequence.hpp"
#include "slp/units.hpp"

using namespace slp;

namespace {

int g_failures = 0;

void report(int id, const char* title, bool ok, const std::string& detail) {
  std::printf("criterion %2d %s  %s  [%s]\n", id, ok ? "PASS" : "FAIL", title,
              detail.c_str());
  if (!ok) ++g_failures;
}

void criterion(int id, const char* title,
               const std::function<std::pair<bool, std::string>()>& body) {
  try {
    const auto [ok, detail] = body();
    report(id, title, ok, detail);
  } catch (const std::exception& e) {
    report(id, title, false, std::string("exception: ") + e.what());
  }
}

std::string data_path(const std::string& name) {
  return std::string(DATA_DIR) + "/" + name;
}

double energy(const Trace& tr, double t0, double t1) {
  return analysis::pulse_energy(tr, t0, t1);
}

double total(const Trace& tr) { return energy(tr, tr.t.front(), tr.t.back()); }

// Worst bookkeeping residual at any sample, normalized to the total input
// (relative per-sample error is meaningless while the input is still tiny).
double max_closure(const TraceSet& ts) {
  double worst = 0;
  for (const auto& ch : ts.channels) {
    const double scale = ch.ledger.back().input_ex;
    if (!(scale > 0)) continue;
    for (const auto& s : ch.ledger) {
      const double accounted = s.emitted_fwd + s.emitted_bwd + s.dissipated_e +
                               s.dissipated_s + s.stored;
      worst = std::max(worst, std::abs(s.input_ex - accounted) / scale);
    }
  }
  return worst;
}

// First time after t0 at which the trace reaches half of its post-t0 maximum.
double half_rise_time(const Trace& tr, double t0) {
  double vmax = 0;
  for (size_t i = 0; i < tr.t.size(); ++i)
    if (tr.t[i] >= t0) vmax = std::max(vmax, tr.intensity[i]);
  for (size_t i = 0; i < tr.t.size(); ++i)
    if (tr.t[i] >= t0 && tr.intensity[i] >= 0.5 * vmax) return tr.t[i];
  return tr.t.back();
}

std::string fmt(const char* f, ...) {
  char buf[256];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

}  // namespace

int main() {
  const auto defaults = params::default_rb87();
  const auto demo = params::load_parameter_file(data_path("slp_demo.params"));
  dynamics::Grid grid;
  grid.n_z = 128;

  double worst_ledger = 0;  // accumulated across every run below

  // 1. Phase-matching geometry: probe angle and the mirrored solution.
  criterion(1, "phase-matching angle and mirrored solution", [&] {
    const auto freqs = geometry::make_beam_frequencies(defaults.constants,
                                                       defaults.controls.delta);
    const auto sol = geometry::solve(freqs, defaults.constants.c0,
                                     defaults.ensemble.length);
    const double deg = sol.angle * 360.0 / kTwoPi;
    const auto mir = geometry::mirror_solution(sol);
    const bool ok = std::abs(deg - 0.345) < 0.005 &&
                    std::abs(mir.angle + sol.angle) < 1e-12 &&
                    std::abs(std::abs(mir.delta_k) - std::abs(sol.delta_k)) <
                        1e-12 * std::max(1.0, std::abs(sol.delta_k));
    return std::make_pair(ok, fmt("angle %.6f deg, mirror residual %.3e 1/m",
                                  deg, std::abs(mir.delta_k)));
  });

  // 2. Balanced drive: zero group velocity and a stationary excitation centroid.
  criterion(2, "balanced drive freezes the polariton", [&] {
    auto balanced = demo.controls;
    balanced.omega_bwc = balanced.omega_fwc;
    const auto angles = polariton::mixing_angles(
        balanced, params::quoted_gn(demo.ensemble.g_n));
    const double vg = polariton::group_velocity(angles, demo.constants.c0);

    const auto timeline = scenario::builtin_timeline("trap-2us");
    const auto w = scenario::derive_windows(timeline);
    const auto ts = scenario::run_timeline(timeline, demo, grid);
    worst_ledger = std::max(worst_ledger, max_closure(ts));
    const auto& ch = ts.channel(1);
    const double t0 = w.bwc_on + 0.2e-6, t1 = w.bwc_off - 0.2e-6;
    const double v = dynamics::centroid_velocity(ch.centroid_t, ch.centroid_z,
                                                 ch.excitation, t0, t1, 1e-6);
    const double drift = std::abs(v) * (w.bwc_off - w.bwc_on);
    const bool ok = vg == 0.0 && drift < 0.05 * demo.ensemble.length;
    return std::make_pair(
        ok, fmt("v_g = %g, centroid drift %.3f%% of L over the trap window",
                vg, 100.0 * drift / demo.ensemble.length));
  });

  // 3. Slow light: measured group delay vs L/v_g and OD*Gamma/Omega^2.
  criterion(3, "slow-light group delay matches theory", [&] {
    const auto timeline = scenario::builtin_timeline("slow-light");
    const auto ts = scenario::run_timeline(timeline, defaults, grid);
    worst_ledger = std::max(worst_ledger, max_closure(ts));
    const auto& ch = ts.channel(1);
    auto fwc_only = defaults.controls;
    fwc_only.omega_bwc = 0;
    const double vg = polariton::group_velocity(
        polariton::mixing_angles(fwc_only,
                                 params::quoted_gn(defaults.ensemble.g_n)),
        defaults.constants.c0);
    const double expected = defaults.ensemble.length / vg;
    const double omega = fwc_only.omega_fwc;
    const double od_form = defaults.ensemble.od * defaults.ensemble.gamma_e /
                           (omega * omega);
    const double measured = analysis::group_delay(ch.fwd, ch.input, 0.0);
    const bool ok = std::abs(measured - expected) < 0.10 * expected &&
                    std::abs(measured - od_form) < 0.15 * od_form;
    return std::make_pair(ok, fmt("delay %.3f us, L/v_g %.3f us, OD form %.3f us",
                                  measured * 1e6, expected * 1e6,
                                  od_form * 1e6));
  });

  // 4. Dark storage decays at 2*gamma_s.
  criterion(4, "storage decay rate equals twice the spin decay", [&] {
    const auto res = scenario::run_storage_decay(defaults, grid);
    const double rate = 1.0 / res.fit.tau;
    const bool ok =
        std::abs(rate - res.expected_rate) < 0.05 * res.expected_rate;
    return std::make_pair(ok, fmt("fitted %.4g 1/s vs expected %.4g 1/s", rate,
                                  res.expected_rate));
  });

  // 5. Trapping suppresses emission; release appears promptly on both channels.
  criterion(5, "suppressed emission while trapped, prompt release", [&] {
    const auto timeline = scenario::builtin_timeline("fig3-slp");
    const auto w = scenario::derive_windows(timeline);
    const auto ts = scenario::run_timeline(timeline, demo, grid);
    worst_ledger = std::max(worst_ledger, max_closure(ts));
    bool ok = true;
    std::ostringstream detail;
    for (const auto& ch : ts.channels) {
      const double trapped = energy(ch.fwd, w.bwc_on, w.bwc_off) +
                             energy(ch.bwd, w.bwc_on, w.bwc_off);
      const double released = energy(ch.fwd, w.bwc_off, w.duration) +
                              energy(ch.bwd, w.bwc_off, w.duration);
      const double ratio = trapped / released;
      const double rise = half_rise_time(ch.fwd, w.bwc_off) - w.bwc_off;
      ok = ok && ratio < 0.10 && rise < 1e-6;
      detail << "ch" << ch.channel << " ratio " << fmt("%.3f", ratio)
             << " rise " << fmt("%.2f us; ", rise * 1e6);
    }
    return std::make_pair(ok, detail.str());
  });

  // 6. Trapping-time sweep: dissipation time in the expected band,
  //    channels consistent.
  criterion(6, "trapping-time sweep decay constant", [&] {
    const auto res = scenario::run_fig4_sweep(defaults, grid);
    for (const auto& run : res.runs)
      worst_ledger = std::max(worst_ledger, max_closure(run));
    const double tau = res.report.tau_diss;
    const double t1 = res.fits.at(1).tau, t2 = res.fits.at(2).tau;
    const bool ok = tau > 0.854e-6 && tau < 1.586e-6 &&
                    std::abs(t1 - t2) < 0.10 * std::max(t1, t2);
    return std::make_pair(ok, fmt("pooled tau %.3f us (ch1 %.3f, ch2 %.3f)",
                                  tau * 1e6, t1 * 1e6, t2 * 1e6));
  });

  // 7. Effective Q factor and N-atom cooperativity at tau = 1.22 us.
  criterion(7, "Q factor and cooperativity scale", [&] {
    const double q =
        params::q_factor(defaults.constants.f0(), 1.22e-6);
    const double n = params::quoted_gn(defaults.ensemble.g_n) /
                     (defaults.cavity.g_single * defaults.cavity.g_single);
    const double cn =
        params::cooperativity(defaults.cavity.g_single, n,
                              defaults.cavity.kappa, defaults.ensemble.gamma_e);
    const bool ok = std::abs(q - 2.9e9) < 0.02 * 2.9e9 && cn > 6.5e6 &&
                    cn < 1.0e7;
    return std::make_pair(ok, fmt("Q %.3e, C_N %.3e (N %.3e)", q, cn, n));
  });

  // 8. Numerical integrity: ledger closure, grid refinement, solver agreement,
  //    exact linear scaling.
  criterion(8, "energy ledger, refinement, and solver cross-checks", [&] {
    // Grid refinement on slow light.
    const auto timeline = sequence::parse_timeline(
        "duration 10us\ninit FWC 1\ninit BWC 0\n"
        "at 2.5us probe ch=1 fwhm=1us amp=1.0\n");
    auto p1 = defaults;
    p1.channels = {{1, p1.ensemble.od, 1.0}};
    dynamics::Grid coarse = grid, fine = grid;
    coarse.n_z = 64;
    fine.n_z = 128;
    fine.dt = 0.5e-9;
    const auto tc = scenario::run_timeline(timeline, p1, coarse);
    const auto tf = scenario::run_timeline(timeline, p1, fine);
    worst_ledger = std::max(worst_ledger, max_closure(tf));
    const double ec = total(tc.channel(1).fwd), ef = total(tf.channel(1).fwd);
    const bool grid_ok = std::abs(ec - ef) < 0.01 * ef;

    // Exact quadratic intensity scaling under a doubled probe amplitude.
    const auto t2 = scenario::run_timeline(
        sequence::parse_timeline(
            "duration 10us\ninit FWC 1\ninit BWC 0\n"
            "at 2.5us probe ch=1 fwhm=1us amp=2.0\n"),
        p1, coarse);
    bool linear_ok = true;
    const auto& a = tc.channel(1).fwd.intensity;
    const auto& b = t2.channel(1).fwd.intensity;
    for (size_t i = 0; i < a.size(); ++i)
      linear_ok = linear_ok && (b[i] == 4.0 * a[i]);

    // Adiabatic vs full-coherence on a reduced configuration.
    auto pr = p1;
    pr.ensemble = params::EnsembleParams::from_od(
        10.0, pr.ensemble.length, kTwoPi * 10e3, pr.ensemble.gamma_e);
    pr.controls.omega_fwc = kTwoPi * 1.52e6;
    pr.controls.omega_bwc = pr.controls.omega_fwc;
    pr.channels = {{1, 10.0, 1.0}};
    dynamics::Grid rg;
    rg.n_z = 64;
    rg.dt = 0.5e-9;
    const auto rt = sequence::parse_timeline(
        "duration 12us\ninit FWC 1\ninit BWC 0\n"
        "at 2.5us probe ch=1 fwhm=1us amp=1.0\n");
    const auto ra =
        scenario::run_timeline(rt, pr, rg, dynamics::SolverKind::Adiabatic);
    const auto rf =
        scenario::run_timeline(rt, pr, rg, dynamics::SolverKind::FullCoherence);
    const double ea = total(ra.channel(1).fwd), eh = total(rf.channel(1).fwd);
    const bool solver_ok = std::abs(ea - eh) < 0.02 * eh;

    const bool ledger_ok = worst_ledger < 0.01;
    const bool ok = ledger_ok && grid_ok && linear_ok && solver_ok;
    return std::make_pair(
        ok, fmt("ledger %.2e, refinement %.3f%%, solvers %.3f%%, scaling %s",
                worst_ledger, 100.0 * std::abs(ec - ef) / ef,
                100.0 * std::abs(ea - eh) / eh, linear_ok ? "exact" : "broken"));
  });

  // 9. Decay fitting: exact recovery and a brute-force cross-check.
  criterion(9, "exponential fit against a brute-force oracle", [&] {
    const double a0 = 0.9, tau0 = 1.22e-6;
    std::vector<std::pair<double, double>> clean, noisy;
    std::mt19937 rng(20240817);
    std::normal_distribution<double> noise(0.0, 0.01);
    for (int i = 0; i <= 6; ++i) {
      const double t = (0.8 + 0.2 * i) * 1e-6;
      clean.emplace_back(t, a0 * std::exp(-t / tau0));
      noisy.emplace_back(t, a0 * std::exp(-t / tau0) * (1.0 + noise(rng)));
    }
    const auto exact = analysis::fit_exponential(clean);
    const bool exact_ok = std::abs(exact.tau - tau0) < 1e-9 * tau0 &&
                          std::abs(exact.amplitude - a0) < 1e-9 * a0;

    const auto fit = analysis::fit_exponential(noisy);
    double best_sse = 1e300, best_tau = 0;
    for (int it = 0; it <= 800; ++it) {
      const double tau = (0.9 + 0.0008 * it) * 1e-6;
      for (int ia = 0; ia <= 200; ++ia) {
        const double a = 0.8 + 0.001 * ia;
        double sse = 0;
        for (const auto& [t, eta] : noisy) {
          const double r = std::log(eta) - (std::log(a) - t / tau);
          sse += r * r;
        }
        if (sse < best_sse) {
          best_sse = sse;
          best_tau = tau;
        }
      }
    }
    const bool oracle_ok = std::abs(fit.tau - best_tau) < 0.01 * best_tau;
    return std::make_pair(exact_ok && oracle_ok,
                          fmt("fit tau %.4f us, oracle %.4f us",
                              fit.tau * 1e6, best_tau * 1e6));
  });

  // 10. Sequence files: exact round trips and line-numbered diagnostics.
  criterion(10, "sequence round trips and diagnostics", [&] {
    bool ok = true;
    std::ostringstream detail;
    for (const char* name : {"fig3_eit.seq", "fig3_slp.seq", "fig4_sweep.seq"}) {
      std::ifstream in(data_path(name));
      std::ostringstream buf;
      buf << in.rdbuf();
      const auto t = sequence::parse_timeline(buf.str());
      const auto printed = sequence::print_timeline(t);
      const auto again = sequence::parse_timeline(printed);
      const bool same = again == t && sequence::print_timeline(again) == printed;
      ok = ok && same;
      detail << name << (same ? " ok; " : " MISMATCH; ");
    }
    try {
      sequence::parse_timeline("duration 10us\nat nonsense\n");
      ok = false;
      detail << "malformed line accepted";
    } catch (const sequence::ParseError& e) {
      const bool lined = e.line == 2 &&
                         std::string(e.what()).find("line 2") != std::string::npos;
      ok = ok && lined;
      detail << "error names line 2: " << (lined ? "yes" : "NO");
    }
    return std::make_pair(ok, detail.str());
  });

  std::printf("%s (%d criteria failed)\n",
              g_failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
              g_failures);
  return g_failures == 0 ? 0 : 1;
}
