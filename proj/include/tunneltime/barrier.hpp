#pragma once

#include "tunneltime/numerics.hpp"

namespace tunneltime {

/// Incident particle. Units: hbar = c = 1, energies in 1/tau_c, momenta in 1/b.
struct ParticleSpec {
  double rest_energy = 1.0;  // eps0 = m c^2
  double momentum = 1.0;     // p > 0

  ParticleSpec() = default;
  ParticleSpec(double rest_energy_, double momentum_);

  /// eps_p = sqrt(p^2 + eps0^2)
  double energy() const { return std::hypot(momentum, rest_energy); }
  /// v0 = p / eps_p, always in (0, 1)
  double group_velocity() const { return momentum / energy(); }

  /// Particle with a given total energy (eps_p > eps0).
  static ParticleSpec from_energy(double rest_energy, double total_energy);
};

/// Rectangular barrier of height V on [-b/2, b/2]. V = 0 encodes free motion.
struct BarrierSpec {
  double height = 0.0;  // V
  double width = 1.0;   // b > 0, the unit of length

  BarrierSpec() = default;
  BarrierSpec(double height_, double width_);

  double tau_c() const { return width; }  // light crossing time b/c
  double left_edge() const { return -0.5 * width; }
  double right_edge() const { return 0.5 * width; }

  /// Evanescent decay constant kappa = sqrt(eps0^2 - (eps_p - V)^2), tunnelling only.
  double evanescent_kappa(const ParticleSpec& particle) const;
};

/// Interior wavevector k(W) = [(eps_p - W)^2 - eps0^2]^{1/2} on the branch that is
/// real >= 0 in both propagating sectors and +i|k| in the evanescent strip.
/// Continuous as W crosses each branch point from the tunnelling side.
Complex wavevector_inside(double eps_p, double w_strength, double rest_energy);

/// Transmission amplitude of the rectangular barrier of strength W, from
/// plane-wave matching of the field and its derivative at z = -b/2, +b/2.
/// Free phase removed: T(p, 0) = 1.
Complex transmission_exact(const ParticleSpec& particle, double w_strength,
                           const BarrierSpec& barrier);

/// Reflection amplitude from the same matching problem and phase convention.
Complex reflection_exact(const ParticleSpec& particle, double w_strength,
                         const BarrierSpec& barrier);

/// Single-scattering amplitude 4pk/(p+k)^2 exp(i(k-p)b).
Complex transmission_semiclassical(const ParticleSpec& particle, double w_strength,
                                   const BarrierSpec& barrier);

/// log T, stable at any depth (|log|T|| beyond double range of T itself).
/// Real part is log|T|, imaginary part the principal-branch phase.
Complex log_transmission_exact(const ParticleSpec& particle, double w_strength,
                               const BarrierSpec& barrier);

}  // namespace tunneltime
