#include "tunneltime/barrier.hpp"

#include <cmath>
#include <sstream>

namespace tunneltime {

ParticleSpec::ParticleSpec(double rest_energy_, double momentum_)
    : rest_energy(rest_energy_), momentum(momentum_) {
  if (!(rest_energy > 0.0) || !std::isfinite(rest_energy))
    throw std::invalid_argument("ParticleSpec: rest energy must be positive");
  if (!(momentum > 0.0) || !std::isfinite(momentum))
    throw std::invalid_argument("ParticleSpec: momentum must be positive (no incident flux otherwise)");
}

ParticleSpec ParticleSpec::from_energy(double rest_energy, double total_energy) {
  if (!(total_energy > rest_energy))
    throw std::invalid_argument("ParticleSpec::from_energy: total energy must exceed rest energy");
  const double p = std::sqrt((total_energy - rest_energy) * (total_energy + rest_energy));
  return ParticleSpec(rest_energy, p);
}

BarrierSpec::BarrierSpec(double height_, double width_) : height(height_), width(width_) {
  if (!(width > 0.0) || !std::isfinite(width))
    throw std::invalid_argument("BarrierSpec: width must be positive");
  if (!std::isfinite(height)) throw std::invalid_argument("BarrierSpec: height must be finite");
}

double BarrierSpec::evanescent_kappa(const ParticleSpec& particle) const {
  const double u = particle.energy() - height;
  const double d = (particle.rest_energy - u) * (particle.rest_energy + u);
  if (!(d > 0.0))
    throw std::domain_error("evanescent_kappa: not in the tunnelling regime (|eps_p - V| >= eps0)");
  return std::sqrt(d);
}

Complex wavevector_inside(double eps_p, double w_strength, double rest_energy) {
  const double u = eps_p - w_strength;
  // Factored discriminant keeps the branch points well conditioned.
  const double d = (u - rest_energy) * (u + rest_energy);
  if (d >= 0.0) return Complex(std::sqrt(d), 0.0);
  return Complex(0.0, std::sqrt(-d));
}

namespace {

// (exp(x) - 1)/x for complex x, series near 0.
Complex expm1_over(Complex x) {
  if (std::abs(x) < 1e-4) {
    return 1.0 + x * (0.5 + x * (1.0 / 6.0 + x * (1.0 / 24.0)));
  }
  return (std::exp(x) - 1.0) / x;
}

// Denominator 4p - 2ib (p-k)^2 (e^{2ikb}-1)/(2ikb), bounded for Im k >= 0;
// equals [(p+k)^2 - (p-k)^2 e^{2ikb}] / k without the k -> 0 indeterminacy.
Complex matching_denominator(double p, Complex k, double b) {
  const Complex pmk = p - k;
  return 4.0 * p - 2.0 * kI * b * pmk * pmk * expm1_over(2.0 * kI * k * b);
}

}  // namespace

Complex transmission_exact(const ParticleSpec& particle, double w_strength,
                           const BarrierSpec& barrier) {
  if (!std::isfinite(w_strength))
    throw std::invalid_argument("transmission_exact: W must be finite");
  if (w_strength == 0.0) return Complex(1.0, 0.0);
  const double p = particle.momentum;
  const double b = barrier.width;
  const Complex k = wavevector_inside(particle.energy(), w_strength, particle.rest_energy);
  return 4.0 * p * std::exp(kI * (k - p) * b) / matching_denominator(p, k, b);
}

Complex reflection_exact(const ParticleSpec& particle, double w_strength,
                         const BarrierSpec& barrier) {
  if (!std::isfinite(w_strength))
    throw std::invalid_argument("reflection_exact: W must be finite");
  if (w_strength == 0.0) return Complex(0.0, 0.0);
  const double p = particle.momentum;
  const double b = barrier.width;
  const Complex k = wavevector_inside(particle.energy(), w_strength, particle.rest_energy);
  const Complex num = (k * k - p * p) * 2.0 * kI * b * expm1_over(2.0 * kI * k * b);
  return num * std::exp(-kI * (p * b)) / matching_denominator(p, k, b);
}

Complex transmission_semiclassical(const ParticleSpec& particle, double w_strength,
                                   const BarrierSpec& barrier) {
  if (!std::isfinite(w_strength))
    throw std::invalid_argument("transmission_semiclassical: W must be finite");
  if (w_strength == 0.0) return Complex(1.0, 0.0);
  const double p = particle.momentum;
  const double b = barrier.width;
  const Complex k = wavevector_inside(particle.energy(), w_strength, particle.rest_energy);
  const Complex pk = p + k;
  return 4.0 * p * k / (pk * pk) * std::exp(kI * (k - p) * b);
}

Complex log_transmission_exact(const ParticleSpec& particle, double w_strength,
                               const BarrierSpec& barrier) {
  const double p = particle.momentum;
  const double b = barrier.width;
  const Complex k = wavevector_inside(particle.energy(), w_strength, particle.rest_energy);
  return std::log(Complex(4.0 * p)) + kI * (k - p) * b -
         std::log(matching_denominator(p, k, b));
}

}  // namespace tunneltime
