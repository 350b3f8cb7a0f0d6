#pragma once

#include <array>
#include <cmath>

#include "slp/params.hpp"

namespace slp::geometry {

struct Vec3 {
  double x = 0, y = 0, z = 0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
};

struct BeamFrequencies {
  double omega_probe = 0;  // rad/s
  double omega_fwc = 0;
  double omega_bwc = 0;
};

// Probe carrier = FWC carrier + hyperfine splitting (two-photon resonance),
// BWC red-detuned from FWC by delta.
BeamFrequencies make_beam_frequencies(const params::PhysicalConstants& c,
                                      double delta);

// Throws std::domain_error if omega_probe != omega_fwc + omega_hf beyond tol.
void check_two_photon_resonance(const BeamFrequencies& f, double omega_hf,
                                double rel_tol = 1e-9);

struct PhaseMatchSolution {
  double angle = 0;  // signed probe-FWC angle, rad
  Vec3 k_probe, k_spin, k_fwd, k_bwd;
  Vec3 k_fwc, k_bwc;
  double delta_k = 0;    // | |k_spin + k_bwc| - |k_fwd| |, rad/m
  double delta_k_l = 0;  // delta_k * medium length
};

// Injection angle between probe and FWC making |k+| = |k-| for exactly
// counter-propagating FWC/BWC of equal magnitude: arccos(k_fwc/k_probe).
double probe_angle(const BeamFrequencies& f, double c0);

// Full solution in the canonical frame (FWC along +z, probe tilted toward +x
// rotated by `azimuth` about the axis). The BWC uses its actual frequency and
// an optional in-plane misalignment tilt from exact counter-propagation.
PhaseMatchSolution solve(const BeamFrequencies& f, double c0, double length,
                         double azimuth = 0.0, double bwc_tilt = 0.0);

// Reflects the probe (and spin wave) through the FWC axis; angle negates.
PhaseMatchSolution mirror_solution(const PhaseMatchSolution& sol);

// Phase-matched solution at the given azimuth about the FWC axis.
PhaseMatchSolution solution_cone(const BeamFrequencies& f, double c0,
                                 double length, double azimuth);

// Dimensionless mismatch | |k_spin + k_bwc| - |k_fwd| | * length.
double residual_mismatch(const PhaseMatchSolution& sol, double length);

}  // namespace slp::geometry
