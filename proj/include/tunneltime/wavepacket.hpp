#pragma once

#include <limits>

#include "tunneltime/barrier.hpp"
#include "tunneltime/numerics.hpp"
#include "tunneltime/traversal.hpp"

namespace tunneltime {

/// Gaussian wavepacket exp(i p0 z) G(z + z0) with G(u) = exp(-u^2 / dz^2),
/// launched at -z0 and moving toward +z.
struct WavepacketSpec {
  double carrier_momentum = 1.0;  // p0
  double width = 1.0;             // dz
  double offset = 2.0;            // z0 > 0

  WavepacketSpec() = default;
  WavepacketSpec(double carrier, double width_, double offset_);

  double spectral_sigma() const { return 1.0 / width; }
  /// Envelope G(u) at (possibly complex) argument.
  Complex envelope(Complex u) const { return std::exp(-u * u / (width * width)); }
  double envelope(double u) const { return std::exp(-u * u / (width * width)); }

  /// Symmetric momentum grid p0 +- span_sigmas * sigma with >= pts_per_sigma
  /// points per spectral standard deviation.
  UniformGrid default_p_grid(double span_sigmas = 8.0, double pts_per_sigma = 12.0) const;
};

/// Sampled complex field at fixed time.
enum class FieldLabel { free_motion, transmitted, traversal_resolved, semiclassical };
struct ComplexField {
  UniformGrid z_grid;
  ArrayXcd values;
  double time = 0.0;
  FieldLabel label = FieldLabel::free_motion;
  // barrier duration this component is conditioned on (traversal_resolved only)
  double resolved_duration = std::numeric_limits<double>::quiet_NaN();

  ComplexSamples samples() const { return ComplexSamples(z_grid, values); }
};

/// Closed-form spectrum A(p) of the Gaussian packet:
/// A(p) = dz/(2 sqrt(pi)) exp(-(p-p0)^2 dz^2/4) exp(i (p-p0) z0).
ComplexSamples momentum_spectrum(const WavepacketSpec& packet, const UniformGrid& p_grid);

/// |A|^2-weight fraction of the spectrum with eps_p - eps0 >= V (above-barrier).
double tunnelling_leak_fraction(const WavepacketSpec& packet, double rest_energy,
                                const BarrierSpec& barrier);

/// Core spectral superposition: sum_p w_p dp spectrum(p) factor(p) e^{i(p z - eps_p t)}.
/// factor may be empty (treated as 1).
ComplexField spectral_pulse(const ComplexSamples& spectrum, double rest_energy,
                            const UniformGrid& z_grid, double time,
                            const ArrayXcd& per_momentum_factor = ArrayXcd(),
                            FieldLabel label = FieldLabel::free_motion);

/// Free propagation of the packet.
ComplexField free_pulse(const WavepacketSpec& packet, double rest_energy,
                        const UniformGrid& z_grid, double time,
                        const UniformGrid& p_grid);

/// Transmitted pulse \int T(p,V) A(p) e^{i(pz - eps_p t)} dp. For V != 0 the
/// spectrum must tunnel: above-barrier weight beyond 1e-6 is rejected.
ComplexField transmitted_pulse_spectral(const WavepacketSpec& packet,
                                        const ParticleSpec& particle,
                                        const BarrierSpec& barrier,
                                        const UniformGrid& z_grid, double time,
                                        const UniformGrid& p_grid);

/// Amplitude conditioned on spending exactly tau in the barrier:
/// \int A(p) eta(p, tau) e^{i(pz - eps_p t)} dp.
ComplexField traversal_resolved_pulse(const WavepacketSpec& packet,
                                      const ParticleSpec& particle,
                                      const BarrierSpec& barrier, double tau,
                                      const UniformGrid& z_grid, double time,
                                      const UniformGrid& p_grid, const WWindow& window);

/// Carrier-factored convolution of the shifted envelope against eta(p0, .):
/// e^{i(p0 z - eps_p0 t)} \int G(z + z0 - b - v0 (t - tau)) eta(tau) dtau.
/// Rejects an eta grid whose ends carry non-negligible integrand weight.
ComplexField convolution_pulse(const WavepacketSpec& packet, const ParticleSpec& particle,
                               const BarrierSpec& barrier, const UniformGrid& z_grid,
                               double time, const TraversalAmplitude& eta);

/// Convolution against the closed-form saddle amplitude (phase-aligned to the
/// exact-T convention), for deep-tunnelling scales where the numeric route
/// cannot reach the transmitted magnitude.
ComplexField convolution_pulse_semiclassical(const WavepacketSpec& packet,
                                             const ParticleSpec& particle,
                                             const BarrierSpec& barrier,
                                             const UniformGrid& z_grid, double time,
                                             const UniformGrid& tau_grid);

/// Complex-shifted envelope form:
/// G(z + z0 - b - v0 (t + i|tau_V|)) T(p0, V) e^{i(p0 z - eps_p0 t)}.
ComplexField semiclassical_pulse(const WavepacketSpec& packet, const ParticleSpec& particle,
                                 const BarrierSpec& barrier, const UniformGrid& z_grid,
                                 double time);

/// locate_peak(a) - locate_peak(b); both fields must share grid and time.
double pulse_advancement(const ComplexField& pulse_a, const ComplexField& pulse_b);

/// b / v0, the classical time in the region at constant velocity.
double classical_crossing_time(const ParticleSpec& particle, const BarrierSpec& barrier);

/// Front-truncated-envelope propagation and light-cone leakage report.
struct CausalitySetup {
  double cutoff = 0.0;           // z' in envelope coordinates; >= 3 dz enforced
  double smoothing_width = 0.0;  // 0 -> mandatory default dz/20
  double margin = 0.0;           // report region z > c t - z0 + margin
  UniformGrid p_grid;            // integration momenta
  double envelope_step = 0.0;    // 0 -> dz/200 sampling of the truncated envelope
};

struct CausalityReport {
  double leakage_ratio = 0.0;   // max |Psi_T| beyond the region boundary / global max
  double global_peak = 0.0;
  double beyond_max = 0.0;
  double region_start = 0.0;    // c t - z0 + margin
  double front_position = 0.0;  // z' - z0 + c t
  double margin = 0.0;
  double smoothing_width = 0.0;
  double cutoff = 0.0;
  ComplexField field;
};

CausalityReport causality_experiment(const WavepacketSpec& packet,
                                     const ParticleSpec& particle,
                                     const BarrierSpec& barrier,
                                     const CausalitySetup& setup,
                                     const UniformGrid& z_grid, double time);

/// Spectrum of the front-truncated, edge-smoothed envelope (numeric transform).
ComplexSamples truncated_spectrum(const WavepacketSpec& packet, double cutoff,
                                  double smoothing_width, const UniformGrid& p_grid,
                                  double envelope_step);

}  // namespace tunneltime
