#include "tunneltime/wavepacket.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tunneltime {

WavepacketSpec::WavepacketSpec(double carrier, double width_, double offset_)
    : carrier_momentum(carrier), width(width_), offset(offset_) {
  if (!(carrier_momentum > 0.0))
    throw std::invalid_argument("WavepacketSpec: carrier momentum must be positive");
  if (!(width > 0.0)) throw std::invalid_argument("WavepacketSpec: width must be positive");
  if (!(offset > 0.0)) throw std::invalid_argument("WavepacketSpec: offset must be positive");
}

UniformGrid WavepacketSpec::default_p_grid(double span_sigmas, double pts_per_sigma) const {
  const double sigma = spectral_sigma();
  const Index n = static_cast<Index>(std::ceil(2.0 * span_sigmas * pts_per_sigma)) + 1;
  return UniformGrid::over(carrier_momentum - span_sigmas * sigma,
                           carrier_momentum + span_sigmas * sigma, n);
}

ComplexSamples momentum_spectrum(const WavepacketSpec& packet, const UniformGrid& p_grid) {
  const double sigma = packet.spectral_sigma();
  if (p_grid.span() < 6.0 * sigma)
    throw std::invalid_argument("momentum_spectrum: p grid must cover >= 6 spectral widths");
  ArrayXcd vals(p_grid.count);
  const double norm = packet.width / (2.0 * std::sqrt(M_PI));
  for (Index i = 0; i < p_grid.count; ++i) {
    const double q = p_grid.point(i) - packet.carrier_momentum;
    vals[i] = norm * std::exp(-0.25 * q * q * packet.width * packet.width) *
              std::exp(kI * (q * packet.offset));
  }
  return ComplexSamples(p_grid, std::move(vals));
}

double tunnelling_leak_fraction(const WavepacketSpec& packet, double rest_energy,
                                const BarrierSpec& barrier) {
  if (barrier.height <= 0.0) return 0.0;
  const double top_energy = rest_energy + barrier.height;
  const double p_top = std::sqrt((top_energy - rest_energy) * (top_energy + rest_energy));
  // |A|^2 is Gaussian with std sigma; weight above p_top (and below -p_top).
  const double sigma = packet.spectral_sigma();
  const double xu = (p_top - packet.carrier_momentum) / (std::sqrt(2.0) * sigma);
  const double xl = (p_top + packet.carrier_momentum) / (std::sqrt(2.0) * sigma);
  return 0.5 * (std::erfc(xu) + std::erfc(xl));
}

namespace {

void check_offset(const WavepacketSpec& packet, const BarrierSpec& barrier) {
  if (packet.offset < 2.0 * barrier.width)
    throw std::invalid_argument("wavepacket: launch offset must satisfy z0 >= 2b");
}

void check_tunnelling(const WavepacketSpec& packet, const ParticleSpec& particle,
                      const BarrierSpec& barrier) {
  if (barrier.height == 0.0) return;
  const double leak = tunnelling_leak_fraction(packet, particle.rest_energy, barrier);
  if (leak > 1e-6) {
    std::ostringstream msg;
    msg << "wavepacket: above-barrier spectral weight " << leak
        << " exceeds 1e-6; not a tunnelling packet";
    throw std::domain_error(msg.str());
  }
}

// Aliasing guard: the p-sampling must resolve exp(i p z - i eps_p t) over the grid.
void check_p_resolution(const UniformGrid& p_grid, double rest_energy,
                        const UniformGrid& z_grid, double time) {
  const double z_lo = z_grid.start, z_hi = z_grid.last();
  double worst = 0.0;
  for (double p : {p_grid.start, p_grid.last()}) {
    const double v = p / std::hypot(p, rest_energy);
    worst = std::max({worst, std::abs(z_lo - v * time), std::abs(z_hi - v * time)});
  }
  if (p_grid.step * worst > M_PI) {
    std::ostringstream msg;
    msg << "spectral_pulse: p step " << p_grid.step << " aliases at this (z, t); needs <= "
        << M_PI / worst;
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

ComplexField spectral_pulse(const ComplexSamples& spectrum, double rest_energy,
                            const UniformGrid& z_grid, double time,
                            const ArrayXcd& per_momentum_factor, FieldLabel label) {
  const UniformGrid& pg = spectrum.grid;
  check_p_resolution(pg, rest_energy, z_grid, time);
  ArrayXcd coeff = spectrum.values;
  if (per_momentum_factor.size() != 0) {
    if (per_momentum_factor.size() != pg.count)
      throw std::invalid_argument("spectral_pulse: factor length does not match p grid");
    coeff *= per_momentum_factor;
  }
  const ArrayXd p = pg.points();
  for (Index k = 0; k < pg.count; ++k) {
    const double eps = std::hypot(p[k], rest_energy);
    coeff[k] *= std::exp(-kI * (eps * time));
  }
  coeff[0] *= 0.5;
  coeff[pg.count - 1] *= 0.5;
  coeff *= pg.step;

  ArrayXcd out(z_grid.count);
  ArrayXcd phase(pg.count);
  for (Index j = 0; j < z_grid.count; ++j) {
    const double z = z_grid.point(j);
    for (Index k = 0; k < pg.count; ++k) phase[k] = std::exp(kI * (p[k] * z));
    out[j] = (coeff * phase).sum();
  }
  ComplexField field;
  field.z_grid = z_grid;
  field.values = std::move(out);
  field.time = time;
  field.label = label;
  return field;
}

ComplexField free_pulse(const WavepacketSpec& packet, double rest_energy,
                        const UniformGrid& z_grid, double time, const UniformGrid& p_grid) {
  return spectral_pulse(momentum_spectrum(packet, p_grid), rest_energy, z_grid, time,
                        ArrayXcd(), FieldLabel::free_motion);
}

ComplexField transmitted_pulse_spectral(const WavepacketSpec& packet,
                                        const ParticleSpec& particle,
                                        const BarrierSpec& barrier,
                                        const UniformGrid& z_grid, double time,
                                        const UniformGrid& p_grid) {
  check_offset(packet, barrier);
  check_tunnelling(packet, particle, barrier);
  ArrayXcd t_factor(p_grid.count);
  for (Index k = 0; k < p_grid.count; ++k) {
    const ParticleSpec component(particle.rest_energy, p_grid.point(k));
    t_factor[k] = transmission_exact(component, barrier.height, barrier);
  }
  return spectral_pulse(momentum_spectrum(packet, p_grid), particle.rest_energy, z_grid,
                        time, t_factor, FieldLabel::transmitted);
}

ComplexField traversal_resolved_pulse(const WavepacketSpec& packet,
                                      const ParticleSpec& particle,
                                      const BarrierSpec& barrier, double tau,
                                      const UniformGrid& z_grid, double time,
                                      const UniformGrid& p_grid, const WWindow& window) {
  check_offset(packet, barrier);
  const UniformGrid wgrid = window.grid();
  const ArrayXd taper = taper_weights(wgrid.count, window.apodization);
  ArrayXcd eta_factor(p_grid.count);
  // eta(p, tau) for each grid momentum: single-tau windowed transform.
  for (Index k = 0; k < p_grid.count; ++k) {
    const ParticleSpec component(particle.rest_energy, p_grid.point(k));
    Complex acc(0.0);
    for (Index i = 0; i < wgrid.count; ++i) {
      const double w = wgrid.point(i);
      Complex t = transmission_exact(component, w, barrier);
      double weight = taper[i];
      if (i == 0 || i == wgrid.count - 1) weight *= 0.5;
      acc += weight * t * std::exp(kI * ((w - window.center) * tau));
    }
    eta_factor[k] = acc * wgrid.step / (2.0 * M_PI);
  }
  ComplexField field = spectral_pulse(momentum_spectrum(packet, p_grid),
                                      particle.rest_energy, z_grid, time, eta_factor,
                                      FieldLabel::traversal_resolved);
  field.resolved_duration = tau;
  return field;
}

namespace {

ComplexField convolve_envelope(const WavepacketSpec& packet, const ParticleSpec& particle,
                               const BarrierSpec& barrier, const UniformGrid& z_grid,
                               double time, const TraversalAmplitude& eta) {
  const double v0 = particle.group_velocity();
  const double eps_p = particle.energy();
  const UniformGrid& tg = eta.tau_grid;
  const ArrayXd taus = tg.points();

  ArrayXcd out(z_grid.count);
  double worst_edge = 0.0;
  for (Index j = 0; j < z_grid.count; ++j) {
    const double z = z_grid.point(j);
    ArrayXcd integrand(tg.count);
    for (Index i = 0; i < tg.count; ++i) {
      const double arg = z + packet.offset - barrier.width - v0 * (time - taus[i]);
      integrand[i] = packet.envelope(arg) * eta.values[i];
    }
    const double row_max = integrand.abs().maxCoeff();
    if (row_max > 0.0) {
      const double edge = std::max(std::abs(integrand[0]), std::abs(integrand[tg.count - 1]));
      worst_edge = std::max(worst_edge, edge / row_max);
    }
    out[j] = trapezoid(tg, integrand);
    out[j] *= std::exp(kI * (packet.carrier_momentum * z - eps_p * time));
  }
  if (worst_edge > 1e-3) {
    const double lo = time - (z_grid.last() + packet.offset - barrier.width) / v0 -
                      4.0 * packet.width / v0;
    const double hi = time - (z_grid.start + packet.offset - barrier.width) / v0 +
                      4.0 * packet.width / v0;
    std::ostringstream msg;
    msg << "convolution_pulse: eta grid too short (edge weight " << worst_edge
        << "); needs tau span [" << lo << ", " << hi << "]";
    throw std::domain_error(msg.str());
  }
  ComplexField field;
  field.z_grid = z_grid;
  field.values = std::move(out);
  field.time = time;
  field.label = FieldLabel::transmitted;
  return field;
}

}  // namespace

ComplexField convolution_pulse(const WavepacketSpec& packet, const ParticleSpec& particle,
                               const BarrierSpec& barrier, const UniformGrid& z_grid,
                               double time, const TraversalAmplitude& eta) {
  check_offset(packet, barrier);
  if (packet.carrier_momentum * barrier.width < 30.0)
    throw std::domain_error("convolution_pulse: semiclassical regime requires p0 b >= 30");
  return convolve_envelope(packet, particle, barrier, z_grid, time, eta);
}

ComplexField convolution_pulse_semiclassical(const WavepacketSpec& packet,
                                             const ParticleSpec& particle,
                                             const BarrierSpec& barrier,
                                             const UniformGrid& z_grid, double time,
                                             const UniformGrid& tau_grid) {
  check_offset(packet, barrier);
  const TraversalAmplitude eta =
      eta_semiclassical_samples(particle, barrier, tau_grid, /*align_phase=*/true);
  return convolve_envelope(packet, particle, barrier, z_grid, time, eta);
}

ComplexField semiclassical_pulse(const WavepacketSpec& packet, const ParticleSpec& particle,
                                 const BarrierSpec& barrier, const UniformGrid& z_grid,
                                 double time) {
  check_offset(packet, barrier);
  const Complex tau_v = saddle_time(particle, barrier);
  const double shift = std::abs(tau_v);
  const double v0 = particle.group_velocity();
  const double eps_p = particle.energy();
  const Complex t0 = transmission_exact(particle, barrier.height, barrier);
  ArrayXcd out(z_grid.count);
  for (Index j = 0; j < z_grid.count; ++j) {
    const double z = z_grid.point(j);
    const Complex arg =
        z + packet.offset - barrier.width - v0 * Complex(time, shift);
    out[j] = packet.envelope(arg) * t0 * std::exp(kI * (packet.carrier_momentum * z - eps_p * time));
  }
  ComplexField field;
  field.z_grid = z_grid;
  field.values = std::move(out);
  field.time = time;
  field.label = FieldLabel::semiclassical;
  return field;
}

double pulse_advancement(const ComplexField& pulse_a, const ComplexField& pulse_b) {
  if (!(pulse_a.z_grid == pulse_b.z_grid) || pulse_a.time != pulse_b.time)
    throw std::invalid_argument("pulse_advancement: fields must share grid and time");
  return locate_peak(pulse_a.samples()) - locate_peak(pulse_b.samples());
}

double classical_crossing_time(const ParticleSpec& particle, const BarrierSpec& barrier) {
  return barrier.width / particle.group_velocity();
}

ComplexSamples truncated_spectrum(const WavepacketSpec& packet, double cutoff,
                                  double smoothing_width, const UniformGrid& p_grid,
                                  double envelope_step) {
  if (!(cutoff >= 3.0 * packet.width))
    throw std::invalid_argument("truncated_spectrum: cutoff must satisfy z' >= 3 dz");
  const double w = smoothing_width > 0.0 ? smoothing_width : packet.width / 20.0;
  const double lo = -6.0 * packet.width;
  const double hi = cutoff;
  const double step = envelope_step > 0.0 ? envelope_step : packet.width / 200.0;
  const Index n = static_cast<Index>(std::ceil((hi - lo) / step)) + 1;
  const UniformGrid ugrid = UniformGrid::over(lo, hi, n);

  ArrayXd env(n);
  for (Index i = 0; i < n; ++i) {
    const double u = ugrid.point(i);
    double ramp = 1.0;
    if (u > cutoff - w) {
      const double x = std::clamp((cutoff - u) / w, 0.0, 1.0);
      ramp = 0.5 * (1.0 - std::cos(M_PI * x));
    }
    env[i] = packet.envelope(u) * ramp;
  }

  // A(p) = (2 pi)^{-1} e^{i (p - p0) z0} \int e^{-i (p - p0) u} G_tr(u) du
  ArrayXcd vals(p_grid.count);
  for (Index k = 0; k < p_grid.count; ++k) {
    const double q = p_grid.point(k) - packet.carrier_momentum;
    ArrayXcd integrand(n);
    for (Index i = 0; i < n; ++i)
      integrand[i] = env[i] * std::exp(-kI * (q * ugrid.point(i)));
    vals[k] = trapezoid(ugrid, integrand) / (2.0 * M_PI) * std::exp(kI * (q * packet.offset));
  }
  return ComplexSamples(p_grid, std::move(vals));
}

CausalityReport causality_experiment(const WavepacketSpec& packet,
                                     const ParticleSpec& particle,
                                     const BarrierSpec& barrier,
                                     const CausalitySetup& setup,
                                     const UniformGrid& z_grid, double time) {
  check_offset(packet, barrier);
  const double smoothing =
      setup.smoothing_width > 0.0 ? setup.smoothing_width : packet.width / 20.0;
  const ComplexSamples spectrum = truncated_spectrum(packet, setup.cutoff, smoothing,
                                                     setup.p_grid, setup.envelope_step);
  ArrayXcd t_factor(setup.p_grid.count);
  for (Index k = 0; k < setup.p_grid.count; ++k) {
    const ParticleSpec component(particle.rest_energy, setup.p_grid.point(k));
    t_factor[k] = transmission_exact(component, barrier.height, barrier);
  }
  ComplexField field = spectral_pulse(spectrum, particle.rest_energy, z_grid, time,
                                      t_factor, FieldLabel::transmitted);

  CausalityReport report;
  report.cutoff = setup.cutoff;
  report.smoothing_width = smoothing;
  report.margin = setup.margin;
  report.region_start = time - packet.offset + setup.margin;  // c = 1
  report.front_position = setup.cutoff - packet.offset + time;
  report.global_peak = field.values.abs().maxCoeff();
  double beyond = 0.0;
  for (Index j = 0; j < z_grid.count; ++j)
    if (z_grid.point(j) > report.region_start)
      beyond = std::max(beyond, std::abs(field.values[j]));
  report.beyond_max = beyond;
  report.leakage_ratio = report.global_peak > 0.0 ? beyond / report.global_peak : 0.0;
  report.field = std::move(field);
  return report;
}

}  // namespace tunneltime
