#include "tunneltime/traversal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace tunneltime {

WWindow::WWindow(double center_, double half_width_, Index count_, Apodization apod)
    : center(center_), half_width(half_width_), count(count_), apodization(apod) {
  if (!(half_width > 0.0)) throw std::invalid_argument("WWindow: half width must be positive");
  if (count < 2) throw std::invalid_argument("WWindow: count must be >= 2");
}

UniformGrid WWindow::grid() const {
  return UniformGrid::over(w_min(), w_max(), count);
}

WWindow WWindow::for_tau_range(double center, double half_width, double tau_max,
                               Apodization apod) {
  if (!(tau_max > 0.0)) throw std::invalid_argument("WWindow::for_tau_range: tau_max must be positive");
  const double dw = 0.9 * M_PI / tau_max;
  const Index count = static_cast<Index>(std::ceil(2.0 * half_width / dw)) + 1;
  return WWindow(center, half_width, count, apod);
}

UniformGrid tau_grid_for_window(const WWindow& window, double tau_max) {
  const double dtau = 0.7 * M_PI / window.half_width;
  Index n = static_cast<Index>(std::ceil(2.0 * tau_max / dtau));
  n += n % 2;  // symmetric grid with a point at tau = 0
  return UniformGrid::over(-tau_max, tau_max, n + 1);
}

WWindow default_w_window(const ParticleSpec& particle, const BarrierSpec& barrier,
                         double tau_max) {
  const double scale =
      std::max(particle.energy() - particle.rest_energy, 1.0 / barrier.tau_c());
  return WWindow::for_tau_range(barrier.height, 40.0 * scale, tau_max);
}

TraversalAmplitude eta_numeric(const ParticleSpec& particle, const BarrierSpec& barrier,
                               const WWindow& window, const UniformGrid& tau_grid) {
  // The transform runs over W - center; for a window centered on V the
  // e^{-iV tau} factor is absorbed exactly, otherwise it is restored below.
  const UniformGrid wgrid = window.grid();
  ArrayXcd t_samples(wgrid.count);
  for (Index i = 0; i < wgrid.count; ++i) {
    const Complex t = transmission_exact(particle, wgrid.point(i), barrier);
    if (!std::isfinite(t.real()) || !std::isfinite(t.imag())) {
      std::ostringstream msg;
      msg << "eta_numeric: non-finite transmission at W = " << wgrid.point(i);
      throw std::domain_error(msg.str());
    }
    t_samples[i] = t;
  }
  const UniformGrid centered(wgrid.start - window.center, wgrid.step, wgrid.count);
  ComplexSamples transform = windowed_fourier(ComplexSamples(centered, std::move(t_samples)),
                                              tau_grid, window.apodization);
  // Sum-rule normalization: scale the symmetric-convention transform by (2 pi)^{-1/2}.
  transform.values *= 1.0 / std::sqrt(2.0 * M_PI);
  // Restore exp(-i V tau) when the window center is not the barrier height.
  if (window.center != barrier.height) {
    const double shift = window.center - barrier.height;
    for (Index i = 0; i < tau_grid.count; ++i)
      transform.values[i] *= std::exp(kI * (shift * tau_grid.point(i)));
  }

  TraversalAmplitude eta;
  eta.tau_grid = tau_grid;
  eta.values = std::move(transform.values);
  eta.window = window;
  eta.momentum = particle.momentum;
  eta.barrier = barrier;
  return eta;
}

Complex eta_semiclassical(const ParticleSpec& particle, const BarrierSpec& barrier,
                          double tau) {
  const double tau_c = barrier.tau_c();
  if (!(tau > tau_c))
    throw std::domain_error("eta_semiclassical: requires tau > tau_c (real branch)");
  const double p = particle.momentum;
  const double b = barrier.width;
  const double eps0 = particle.rest_energy;
  const double eps_p = particle.energy();
  const double s = std::sqrt((tau - tau_c) * (tau + tau_c));
  const double prefactor = 4.0 * p * b * std::pow(eps0, 1.5) * tau_c * tau_c * tau_c /
                           (std::sqrt(2.0 * M_PI) * std::sqrt(s) *
                            std::pow(p * b * s + eps0 * tau_c * tau_c, 2));
  const double phase = (eps_p - barrier.height) * tau - eps0 * s - 0.25 * M_PI;
  return prefactor * std::exp(kI * phase);
}

Complex incident_phase(const ParticleSpec& particle, const BarrierSpec& barrier) {
  return std::exp(-kI * (particle.momentum * barrier.width));
}

TraversalAmplitude eta_semiclassical_samples(const ParticleSpec& particle,
                                             const BarrierSpec& barrier,
                                             const UniformGrid& tau_grid,
                                             bool align_phase) {
  if (!(tau_grid.start > barrier.tau_c()))
    throw std::domain_error("eta_semiclassical_samples: grid must start above tau_c");
  ArrayXcd vals(tau_grid.count);
  const Complex align = align_phase ? incident_phase(particle, barrier) : Complex(1.0);
  for (Index i = 0; i < tau_grid.count; ++i)
    vals[i] = align * eta_semiclassical(particle, barrier, tau_grid.point(i));
  TraversalAmplitude eta;
  eta.tau_grid = tau_grid;
  eta.values = std::move(vals);
  eta.window = WWindow(barrier.height, 1.0, 2, Apodization::none());
  eta.momentum = particle.momentum;
  eta.barrier = barrier;
  return eta;
}

Complex saddle_time(const ParticleSpec& particle, const BarrierSpec& barrier) {
  const double u = particle.energy() - barrier.height;
  const double eps0 = particle.rest_energy;
  if (!(std::abs(u) < eps0))
    throw std::domain_error("saddle_time: requires |eps_p - V| < eps0 (tunnelling regime)");
  const double root = std::sqrt((eps0 - u) * (eps0 + u));
  return -kI * barrier.tau_c() * u / root;
}

Complex complex_mean_time(const TraversalAmplitude& eta) {
  const ComplexSamples samples = eta.samples();
  const Complex denom = integrate_samples(samples);
  if (std::abs(denom) < 1e-300)
    throw std::domain_error("complex_mean_time: vanishing postselection amplitude");
  const ArrayXd taus = eta.tau_grid.points();
  const Complex num = trapezoid(eta.tau_grid, (taus.cast<Complex>() * eta.values));
  return num / denom;
}

Complex mean_time_from_transmission(const ParticleSpec& particle,
                                    const BarrierSpec& barrier,
                                    TransmissionRoute route) {
  const double v = barrier.height;
  if (route == TransmissionRoute::semiclassical) {
    const Complex k = wavevector_inside(particle.energy(), v, particle.rest_energy);
    if (std::abs(k) < 1e-12)
      throw std::domain_error("mean_time_from_transmission: W at a branch point");
    const Complex dk_dw = -(particle.energy() - v) / k;
    const Complex dlogt =
        (1.0 / k - 2.0 / (particle.momentum + k) + kI * barrier.width) * dk_dw;
    return kI * dlogt;
  }
  const double scale = std::max({1.0, std::abs(v), particle.energy() - particle.rest_energy});
  const double h = 1e-6 * scale;
  const Complex tp = transmission_exact(particle, v + h, barrier);
  const Complex tm = transmission_exact(particle, v - h, barrier);
  const Complex t0 = transmission_exact(particle, v, barrier);
  if (std::abs(t0) < 1e-300)
    throw std::domain_error("mean_time_from_transmission: transmission underflow");
  return kI * (tp - tm) / (2.0 * h * t0);
}

double stationary_point_estimate(const TraversalAmplitude& eta, double smoothing_half_width) {
  const ComplexSamples smoothed = boxcar_smooth(eta.samples(), smoothing_half_width);
  return locate_peak(smoothed);
}

SumRuleCheck sum_rule_check(const TraversalAmplitude& eta, const ParticleSpec& particle) {
  SumRuleCheck out;
  out.integral = integrate_samples(eta.samples());
  out.transmission = transmission_exact(particle, eta.barrier.height, eta.barrier);
  out.relative_error = std::abs(out.integral - out.transmission) / std::abs(out.transmission);
  return out;
}

double zero_crossing_frequency(const TraversalAmplitude& eta, double tau_lo, double tau_hi) {
  std::vector<double> crossings;
  double prev_tau = 0.0, prev_re = 0.0;
  bool have_prev = false;
  for (Index i = 0; i < eta.tau_grid.count; ++i) {
    const double tau = eta.tau_grid.point(i);
    if (tau < tau_lo || tau > tau_hi) continue;
    const double re = eta.values[i].real();
    if (have_prev && prev_re != 0.0 && ((prev_re < 0.0) != (re < 0.0))) {
      // linear interpolation of the crossing
      crossings.push_back(prev_tau + (tau - prev_tau) * prev_re / (prev_re - re));
    }
    prev_tau = tau;
    prev_re = re;
    have_prev = true;
  }
  if (crossings.size() < 3)
    throw std::domain_error("zero_crossing_frequency: fewer than 3 crossings in range");
  std::vector<double> spacing(crossings.size() - 1);
  for (size_t i = 0; i + 1 < crossings.size(); ++i) spacing[i] = crossings[i + 1] - crossings[i];
  std::nth_element(spacing.begin(), spacing.begin() + spacing.size() / 2, spacing.end());
  const double median = spacing[spacing.size() / 2];
  return M_PI / median;
}

}  // namespace tunneltime
