#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

#include "slp/params.hpp"

namespace slp::polariton {

using Complex = std::complex<double>;

struct MixingAngles {
  double phi = 0;    // rad, tan(phi) = Omega_BWC / Omega_FWC
  double theta = 0;  // rad, tan^2(theta) = g^2 N / Omega^2
  // cos(2 phi) carried in ratio form so a balanced drive gives exactly zero.
  double cos_two_phi = 1;
};

// Both angles land in [0, pi/2]. Throws std::domain_error when Omega = 0
// (all-spin limit, theta undefined) or when both Rabi frequencies vanish.
inline MixingAngles mixing_angles(const params::ControlParams& controls,
                                  double g_n) {
  const double of = controls.omega_fwc;
  const double ob = controls.omega_bwc;
  if (of == 0 && ob == 0) {
    throw std::domain_error("mixing_angles: both Rabi frequencies are zero");
  }
  const double omega_sq = of * of + ob * ob;
  if (!(omega_sq > 0)) {
    throw std::domain_error("mixing_angles: Omega = 0, theta undefined");
  }
  if (g_n < 0) throw std::domain_error("mixing_angles: g_n must be >= 0");
  MixingAngles a;
  a.phi = std::atan2(ob, of);
  a.theta = std::atan(std::sqrt(g_n / omega_sq));
  a.cos_two_phi = (of - ob) * (of + ob) / omega_sq;
  return a;
}

// v_g = c0 cos^2(theta) cos(2 phi); negative for backward-dominant drive.
inline double group_velocity(const MixingAngles& a, double c0) {
  const double ct = std::cos(a.theta);
  return c0 * ct * ct * a.cos_two_phi;
}

// psi = [e_plus cos(phi) + e_minus sin(phi)] cos(theta) - spin sin(theta)
inline Complex polariton_amplitude(Complex e_plus, Complex e_minus,
                                   Complex spin, const MixingAngles& a) {
  return (e_plus * std::cos(a.phi) + e_minus * std::sin(a.phi)) *
             std::cos(a.theta) -
         spin * std::sin(a.theta);
}

struct PolaritonSample {
  Complex e_plus, e_minus, spin, psi;

  static PolaritonSample make(Complex e_plus, Complex e_minus, Complex spin,
                              const MixingAngles& a) {
    return {e_plus, e_minus, spin,
            polariton_amplitude(e_plus, e_minus, spin, a)};
  }
};

}  // namespace slp::polariton
