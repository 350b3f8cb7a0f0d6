#include "slp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace slp::analysis {

namespace {

double interp(const Trace& tr, double t) {
  const auto& ts = tr.t;
  const auto it = std::lower_bound(ts.begin(), ts.end(), t);
  if (it == ts.begin()) return tr.intensity.front();
  if (it == ts.end()) return tr.intensity.back();
  const size_t i = it - ts.begin();
  const double w = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
  return tr.intensity[i - 1] + w * (tr.intensity[i] - tr.intensity[i - 1]);
}

}  // namespace

double pulse_energy(const Trace& trace, double t0, double t1) {
  trace.validate();
  if (t1 < t0) throw std::invalid_argument("pulse_energy: inverted window");
  if (trace.t.empty()) return 0.0;
  if (t0 < trace.t.front() - 1e-12 || t1 > trace.t.back() + 1e-12) {
    throw std::invalid_argument("pulse_energy: window outside trace span");
  }
  t0 = std::max(t0, trace.t.front());
  t1 = std::min(t1, trace.t.back());
  if (t1 <= t0) return 0.0;

  double sum = 0;
  double prev_t = t0;
  double prev_v = interp(trace, t0);
  for (size_t i = 0; i < trace.t.size(); ++i) {
    const double t = trace.t[i];
    if (t <= t0) continue;
    if (t >= t1) break;
    sum += 0.5 * (prev_v + trace.intensity[i]) * (t - prev_t);
    prev_t = t;
    prev_v = trace.intensity[i];
  }
  sum += 0.5 * (prev_v + interp(trace, t1)) * (t1 - prev_t);
  return sum;
}

double efficiency(const Trace& out, const Trace& ref_input, double out_t0,
                  double out_t1, double in_t0, double in_t1) {
  const double e_in = pulse_energy(ref_input, in_t0, in_t1);
  if (!(e_in > 0)) throw std::domain_error("efficiency: zero reference energy");
  return pulse_energy(out, out_t0, out_t1) / e_in;
}

double peak_time(const Trace& trace, double t0, double t1,
                 double ambiguity_ratio) {
  trace.validate();
  size_t lo = 0, hi = trace.t.size();
  while (lo < hi && trace.t[lo] < t0) ++lo;
  while (hi > lo && trace.t[hi - 1] > t1) --hi;
  if (hi - lo < 3) throw std::domain_error("peak_time: window too small");

  size_t imax = lo;
  for (size_t i = lo; i < hi; ++i) {
    if (trace.intensity[i] > trace.intensity[imax]) imax = i;
  }
  const double vmax = trace.intensity[imax];
  if (!(vmax > 0)) throw std::domain_error("peak_time: flat trace");

  // Reject multi-peak ambiguity: another local maximum comparable to the
  // dominant one, away from it.
  for (size_t i = lo + 1; i + 1 < hi; ++i) {
    if (std::llabs(static_cast<long long>(i) - static_cast<long long>(imax)) <= 5)
      continue;
    if (trace.intensity[i] >= trace.intensity[i - 1] &&
        trace.intensity[i] >= trace.intensity[i + 1] &&
        trace.intensity[i] >= ambiguity_ratio * vmax) {
      throw std::domain_error("peak_time: ambiguous multi-peak trace");
    }
  }

  if (imax == lo || imax + 1 == hi) return trace.t[imax];
  const double y0 = trace.intensity[imax - 1];
  const double y1 = trace.intensity[imax];
  const double y2 = trace.intensity[imax + 1];
  const double denom = y0 - 2 * y1 + y2;
  if (denom == 0) return trace.t[imax];
  const double shift = 0.5 * (y0 - y2) / denom;
  const double dt = 0.5 * (trace.t[imax + 1] - trace.t[imax - 1]);
  return trace.t[imax] + shift * dt;
}

double group_delay(const Trace& out, const Trace& in_ref, double storage_time,
                   double out_t0, double out_t1) {
  const double tp_out = peak_time(out, out_t0, out_t1);
  const double tp_in = peak_time(in_ref, in_ref.t.front(), in_ref.t.back());
  return tp_out - tp_in - storage_time;
}

double group_delay(const Trace& out, const Trace& in_ref, double storage_time) {
  return group_delay(out, in_ref, storage_time, out.t.front(), out.t.back());
}

DecayFit fit_exponential(
    const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) {
    throw std::invalid_argument("fit_exponential: need >= 3 points");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [t, eta] : points) {
    if (!(eta > 0)) {
      throw std::domain_error("fit_exponential: non-positive efficiency point");
    }
    const double y = std::log(eta);
    sx += t;
    sy += y;
    sxx += t * t;
    sxy += t * y;
  }
  const double n = static_cast<double>(points.size());
  const double det = n * sxx - sx * sx;
  if (det == 0) {
    throw std::domain_error("fit_exponential: degenerate time values");
  }
  const double slope = (n * sxy - sx * sy) / det;
  const double intercept = (sy - slope * sx) / n;
  if (!(slope < 0)) {
    throw std::domain_error("fit_exponential: non-decaying data");
  }
  DecayFit fit;
  fit.amplitude = std::exp(intercept);
  fit.tau = -1.0 / slope;
  double ss = 0;
  for (const auto& [t, eta] : points) {
    const double r = std::log(eta) - (intercept + slope * t);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

std::string Report::to_json() const {
  std::ostringstream os;
  os.precision(17);
  os << "{\n"
     << "  \"tau_diss_s\": " << tau_diss << ",\n"
     << "  \"fit_amplitude\": " << fit_amplitude << ",\n"
     << "  \"fit_residual\": " << fit_residual << ",\n"
     << "  \"f0_hz\": " << f0 << ",\n"
     << "  \"q_factor\": " << q << ",\n"
     << "  \"cooperativity\": " << c_n << ",\n"
     << "  \"g_single_rad_s\": " << g_single << ",\n"
     << "  \"kappa_rad_s\": " << kappa << ",\n"
     << "  \"n_atoms\": " << n_atoms << "\n"
     << "}\n";
  return os.str();
}

std::string Report::to_table() const {
  std::ostringstream os;
  os.precision(4);
  os << "dissipation time tau : " << tau_diss * 1e6 << " us\n"
     << "fit amplitude        : " << fit_amplitude << "\n"
     << "fit residual (log)   : " << fit_residual << "\n"
     << "resonant frequency f0: " << f0 * 1e-12 << " THz\n"
     << "effective Q factor   : " << q << "\n";
  if (c_n > 0) {
    os << "N-atom cooperativity : " << c_n << "\n"
       << "atom number N        : " << n_atoms << "\n";
  }
  return os.str();
}

Report summarize(const DecayFit& fit,
                 const params::PhysicalConstants& constants,
                 const params::CavityAnalogyParams& cavity, double gn_quoted,
                 double gamma_e) {
  if (!(fit.tau >= 0)) throw std::domain_error("summarize: invalid fit");
  Report r;
  r.tau_diss = fit.tau;
  r.fit_amplitude = fit.amplitude;
  r.fit_residual = fit.residual;
  r.f0 = constants.f0();
  r.q = fit.tau > 0 ? params::q_factor(r.f0, fit.tau) : 0.0;
  r.g_single = cavity.g_single;
  r.kappa = cavity.kappa;
  if (gn_quoted > 0 && cavity.g_single > 0 && cavity.kappa > 0 &&
      gamma_e > 0) {
    r.n_atoms = gn_quoted / (cavity.g_single * cavity.g_single);
    r.c_n = params::cooperativity(cavity.g_single, r.n_atoms, cavity.kappa,
                                  gamma_e);
  }
  return r;
}

}  // namespace slp::analysis
