#pragma once

#include "tunneltime/barrier.hpp"
#include "tunneltime/numerics.hpp"

namespace tunneltime {

/// Finite integration window in barrier strength W, centered on the
/// evaluation height. count is the number of W samples.
struct WWindow {
  double center = 0.0;
  double half_width = 1.0;
  Index count = 2;
  Apodization apodization = Apodization::cosine_taper(0.1);

  WWindow() = default;
  WWindow(double center_, double half_width_, Index count_, Apodization apod);

  double w_min() const { return center - half_width; }
  double w_max() const { return center + half_width; }
  UniformGrid grid() const;

  /// Window centered on the barrier height with the sample count implied by
  /// the largest |tau| to be resolved (trapezoid step 0.9*pi/tau_max).
  static WWindow for_tau_range(double center, double half_width, double tau_max,
                               Apodization apod = Apodization::cosine_taper(0.1));
};

/// tau grid with step 0.7*pi / max|W - center| over the window, spanning [-tau_max, tau_max].
UniformGrid tau_grid_for_window(const WWindow& window, double tau_max);

/// Default window: [V - 40*scale, V + 40*scale], scale = max(eps_p - eps0, 1/tau_c).
WWindow default_w_window(const ParticleSpec& particle, const BarrierSpec& barrier,
                         double tau_max);

/// Sampled traversal-time amplitude distribution eta(p, tau).
struct TraversalAmplitude {
  UniformGrid tau_grid;
  ArrayXcd values;
  WWindow window;
  double momentum = 0.0;
  BarrierSpec barrier;

  ComplexSamples samples() const { return ComplexSamples(tau_grid, values); }
};

/// eta(p, tau) = (2*pi)^{-1} exp(-i V tau) \int exp(i W tau) T(p, W) dW over the
/// window, normalized so that \int eta dtau = T(p, V).
TraversalAmplitude eta_numeric(const ParticleSpec& particle, const BarrierSpec& barrier,
                               const WWindow& window, const UniformGrid& tau_grid);

/// Closed-form saddle-point amplitude, real branch tau > tau_c.
/// Carries the incident plane-wave phase across the barrier; multiply by
/// incident_phase() to compare with the exact-T convention (T(p,0) = 1).
Complex eta_semiclassical(const ParticleSpec& particle, const BarrierSpec& barrier,
                          double tau);

TraversalAmplitude eta_semiclassical_samples(const ParticleSpec& particle,
                                             const BarrierSpec& barrier,
                                             const UniformGrid& tau_grid,
                                             bool align_phase = false);

/// exp(-i p b): the constant free phase removed from T so that T(p,0) = 1.
Complex incident_phase(const ParticleSpec& particle, const BarrierSpec& barrier);

/// Purely imaginary saddle tau_V = -i tau_c (eps_p - V)/sqrt(eps0^2 - (eps_p - V)^2).
/// Requires |eps_p - V| < eps0 (tunnelling regime).
Complex saddle_time(const ParticleSpec& particle, const BarrierSpec& barrier);

/// First-moment ratio \int tau eta dtau / \int eta dtau by trapezoid.
Complex complex_mean_time(const TraversalAmplitude& eta);

enum class TransmissionRoute { exact, semiclassical };

/// Mean traversal time through the W-space generator of the moments:
/// tau_bar = i d(log T)/dW at W = V, an identity of the Fourier pair.
Complex mean_time_from_transmission(const ParticleSpec& particle,
                                    const BarrierSpec& barrier,
                                    TransmissionRoute route);

/// Abscissa of the peak of the boxcar-smoothed |eta|: the stationary-phase
/// region, approaching b/v0 for free motion in the semiclassical regime.
double stationary_point_estimate(const TraversalAmplitude& eta, double smoothing_half_width);

/// Windowed sum rule: trapezoid of eta over its grid vs T(p, V).
struct SumRuleCheck {
  Complex integral;
  Complex transmission;
  double relative_error;
};
SumRuleCheck sum_rule_check(const TraversalAmplitude& eta, const ParticleSpec& particle);

/// Median spacing of consecutive zero crossings of Re(eta) on [tau_lo, tau_hi],
/// converted to an angular frequency pi/spacing. Requires >= 3 crossings.
double zero_crossing_frequency(const TraversalAmplitude& eta, double tau_lo, double tau_hi);

}  // namespace tunneltime
