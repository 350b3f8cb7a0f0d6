#include "slp/geometry.hpp"

#include <stdexcept>

namespace slp::geometry {

BeamFrequencies make_beam_frequencies(const params::PhysicalConstants& c,
                                      double delta) {
  c.validate();
  BeamFrequencies f;
  f.omega_fwc = c.carrier_omega();
  f.omega_probe = f.omega_fwc + c.omega_hf;
  f.omega_bwc = f.omega_fwc - delta;
  return f;
}

void check_two_photon_resonance(const BeamFrequencies& f, double omega_hf,
                                double rel_tol) {
  const double expected = f.omega_fwc + omega_hf;
  if (std::abs(f.omega_probe - expected) > rel_tol * expected) {
    throw std::domain_error("two-photon resonance violated");
  }
}

double probe_angle(const BeamFrequencies& f, double c0) {
  if (!(f.omega_probe > 0) || !(f.omega_fwc > 0) ||
      f.omega_probe < f.omega_fwc) {
    throw std::domain_error("probe_angle: need omega_probe >= omega_fwc > 0");
  }
  const double kc = f.omega_fwc / c0;
  const double kp = f.omega_probe / c0;
  if (kc > kp) throw std::domain_error("probe_angle: no solution, k_fwc > k_probe");
  return std::acos(kc / kp);
}

namespace {

PhaseMatchSolution build(const BeamFrequencies& f, double c0, double length,
                         double polar, double azimuth, double bwc_tilt,
                         double signed_angle) {
  PhaseMatchSolution sol;
  const double kp = f.omega_probe / c0;
  const double kc = f.omega_fwc / c0;
  const double kb = f.omega_bwc / c0;

  sol.k_fwc = {0, 0, kc};
  sol.k_bwc = {kb * std::sin(bwc_tilt), 0, -kb * std::cos(bwc_tilt)};
  sol.k_probe = {kp * std::sin(polar) * std::cos(azimuth),
                 kp * std::sin(polar) * std::sin(azimuth),
                 kp * std::cos(polar)};
  sol.k_spin = sol.k_probe - sol.k_fwc;
  sol.k_fwd = sol.k_spin + sol.k_fwc;  // identical to k_probe by construction
  sol.k_bwd = sol.k_spin + sol.k_bwc;
  sol.delta_k = std::abs(sol.k_bwd.norm() - sol.k_fwd.norm());
  sol.delta_k_l = sol.delta_k * length;
  sol.angle = signed_angle;
  return sol;
}

}  // namespace

PhaseMatchSolution solve(const BeamFrequencies& f, double c0, double length,
                         double azimuth, double bwc_tilt) {
  const double polar = probe_angle(f, c0);
  // Sign convention: positive for azimuths in (-pi/2, pi/2], negative on the
  // mirrored half of the cone.
  const double sign = std::cos(azimuth) >= 0 ? 1.0 : -1.0;
  return build(f, c0, length, polar, azimuth, bwc_tilt, sign * polar);
}

PhaseMatchSolution mirror_solution(const PhaseMatchSolution& sol) {
  PhaseMatchSolution m = sol;
  const double axis_norm = sol.k_fwc.norm();
  if (!(axis_norm > 0)) throw std::domain_error("mirror_solution: zero FWC axis");
  const Vec3 axis = sol.k_fwc * (1.0 / axis_norm);
  // Reflection through the axis line: keep the parallel component, negate the
  // perpendicular one.
  const auto reflect = [&](const Vec3& v) {
    const Vec3 par = axis * v.dot(axis);
    return par * 2.0 - v;
  };
  m.k_probe = reflect(sol.k_probe);
  m.k_spin = reflect(sol.k_spin);
  m.k_fwd = reflect(sol.k_fwd);
  m.k_bwd = m.k_spin + sol.k_bwc;
  m.delta_k = std::abs(m.k_bwd.norm() - m.k_fwd.norm());
  // Recover the length scale from the input solution when it carries one.
  m.delta_k_l = sol.delta_k > 0 ? m.delta_k * (sol.delta_k_l / sol.delta_k)
                                : sol.delta_k_l;
  m.angle = -sol.angle;
  return m;
}

PhaseMatchSolution solution_cone(const BeamFrequencies& f, double c0,
                                 double length, double azimuth) {
  return solve(f, c0, length, azimuth, 0.0);
}

double residual_mismatch(const PhaseMatchSolution& sol, double length) {
  return std::abs((sol.k_spin + sol.k_bwc).norm() - sol.k_fwd.norm()) * length;
}

}  // namespace slp::geometry
