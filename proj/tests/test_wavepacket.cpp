#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "tunneltime/wavepacket.hpp"

using namespace tunneltime;

namespace {

const double kEps0 = 50.0;

BarrierSpec barrier_for_kappa(const ParticleSpec& particle, double kappa_b) {
  const double u = std::sqrt((particle.rest_energy - kappa_b) * (particle.rest_energy + kappa_b));
  return BarrierSpec(particle.energy() - u, 1.0);
}

}  // namespace

TEST_CASE("momentum spectrum: fourier inversion reproduces the packet") {
  const WavepacketSpec packet(30.0, 1.0, 2.5);
  const UniformGrid p_grid = packet.default_p_grid(10.0, 12.0);
  const ComplexSamples spectrum = momentum_spectrum(packet, p_grid);
  const UniformGrid z_grid = UniformGrid::over(-6.5, 1.5, 801);
  const ComplexField back = spectral_pulse(spectrum, kEps0, z_grid, 0.0);
  double worst = 0.0, scale = 0.0;
  for (Index i = 0; i < z_grid.count; ++i) {
    const double z = z_grid.point(i);
    const Complex exact = std::exp(kI * (packet.carrier_momentum * z)) *
                          packet.envelope(z + packet.offset);
    worst = std::max(worst, std::abs(back.values[i] - exact));
    scale = std::max(scale, std::abs(exact));
  }
  CHECK(worst / scale < 1e-8);
}

TEST_CASE("momentum spectrum: gaussian magnitude peaks at the carrier") {
  const WavepacketSpec packet(30.0, 0.7, 3.0);
  const ComplexSamples spectrum = momentum_spectrum(packet, packet.default_p_grid());
  CHECK(std::abs(locate_peak(spectrum) - 30.0) < 1e-6);
  CHECK_THROWS_AS(momentum_spectrum(packet, UniformGrid::over(29.0, 31.0, 11)),
                  std::invalid_argument);  // under 6 spectral widths
}

TEST_CASE("caption-scale packet tunnels entirely") {
  const ParticleSpec particle = ParticleSpec::from_energy(6000.0, 6007.5);
  const WavepacketSpec packet(particle.momentum, 0.55, 2.5);
  CHECK(packet.spectral_sigma() == doctest::Approx(1.0 / 0.55));  // ~1.82
  const BarrierSpec barrier(15.0, 1.0);
  CHECK(tunnelling_leak_fraction(packet, 6000.0, barrier) < 1e-6);
  // all momenta in the 6-sigma support stay below the barrier top
  const double p_top = std::sqrt((6000.0 + 15.0) * (6000.0 + 15.0) - 6000.0 * 6000.0);
  CHECK(particle.momentum + 6.0 * packet.spectral_sigma() < p_top);
}

TEST_CASE("admissibility rejection for a leaking spectrum") {
  const ParticleSpec particle(kEps0, 30.0);
  const BarrierSpec barrier = barrier_for_kappa(particle, 10.0);
  const WavepacketSpec narrow(30.0, 0.5, 2.5);  // sigma = 2: heavy above-barrier weight
  CHECK(tunnelling_leak_fraction(narrow, kEps0, barrier) > 1e-6);
  CHECK_THROWS_AS(transmitted_pulse_spectral(narrow, particle, barrier,
                                             UniformGrid::over(10.0, 20.0, 51), 30.0,
                                             narrow.default_p_grid()),
                  std::domain_error);
}

TEST_CASE("free pulse: peak follows the classical trajectory") {
  const ParticleSpec particle(kEps0, 30.0);
  const WavepacketSpec packet(30.0, 1.0, 2.5);
  const double t = 30.0;
  const double v0 = particle.group_velocity();
  const UniformGrid z_grid = UniformGrid::over(v0 * t - 2.5 - 4.0, v0 * t - 2.5 + 4.0, 801);
  const ComplexField pulse = free_pulse(packet, kEps0, z_grid, t, packet.default_p_grid());
  CHECK(std::abs(locate_peak(pulse.samples()) - (v0 * t - 2.5)) < 0.05);
}

TEST_CASE("free pulse: norm is conserved") {
  const ParticleSpec particle = ParticleSpec::from_energy(6000.0, 6007.5);
  const WavepacketSpec packet(particle.momentum, 0.55, 2.5);
  const UniformGrid p_grid = packet.default_p_grid(10.0, 12.0);
  const double v0 = particle.group_velocity();
  const double t = 100.0;
  const UniformGrid g0 = UniformGrid::over(-2.5 - 5.0, -2.5 + 5.0, 2001);
  const UniformGrid g1 = UniformGrid::over(-2.5 + v0 * t - 5.0, -2.5 + v0 * t + 5.0, 2001);
  const ComplexField f0 = free_pulse(packet, 6000.0, g0, 0.0, p_grid);
  const ComplexField f1 = free_pulse(packet, 6000.0, g1, t, p_grid);
  const double n0 = trapezoid(g0, f0.values.abs2().cast<Complex>()).real();
  const double n1 = trapezoid(g1, f1.values.abs2().cast<Complex>()).real();
  CHECK(std::abs(n1 - n0) / n0 < 1e-6);
}

TEST_CASE("transmitted pulse at V = 0 equals the free pulse") {
  const ParticleSpec particle(kEps0, 30.0);
  const BarrierSpec no_barrier(0.0, 1.0);
  const WavepacketSpec packet(30.0, 1.0, 2.5);
  const UniformGrid p_grid = packet.default_p_grid();
  const UniformGrid z_grid = UniformGrid::over(10.0, 16.0, 601);
  const ComplexField free = free_pulse(packet, kEps0, z_grid, 30.0, p_grid);
  const ComplexField tun =
      transmitted_pulse_spectral(packet, particle, no_barrier, z_grid, 30.0, p_grid);
  CHECK((tun.values - free.values).abs().maxCoeff() <
        1e-12 * free.values.abs().maxCoeff());
}

TEST_CASE("traversal-resolved pulse matches a brute-force double sum") {
  const ParticleSpec particle(kEps0, 30.0);
  const BarrierSpec barrier(0.0, 1.0);
  const WavepacketSpec packet(30.0, 1.0, 2.5);
  const UniformGrid p_grid = UniformGrid::over(26.0, 34.0, 97);
  const UniformGrid z_grid = UniformGrid::over(12.0, 13.0, 11);
  const WWindow window = WWindow::for_tau_range(0.0, 15.0, 50.0);
  const double tau = 1.9, t = 30.0;
  const ComplexField phi =
      traversal_resolved_pulse(packet, particle, barrier, tau, z_grid, t, p_grid, window);

  const ComplexSamples spectrum = momentum_spectrum(packet, p_grid);
  const UniformGrid wg = window.grid();
  const ArrayXd taper = taper_weights(wg.count, window.apodization);
  for (Index j = 0; j < z_grid.count; j += 5) {
    Complex outer(0.0);
    for (Index k = 0; k < p_grid.count; ++k) {
      const ParticleSpec comp(kEps0, p_grid.point(k));
      Complex eta(0.0);
      for (Index i = 0; i < wg.count; ++i) {
        double wt = taper[i];
        if (i == 0 || i == wg.count - 1) wt *= 0.5;
        eta += wt * transmission_exact(comp, wg.point(i), barrier) *
               std::exp(kI * (wg.point(i) * tau));
      }
      eta *= wg.step / (2.0 * M_PI);
      double pw = (k == 0 || k == p_grid.count - 1) ? 0.5 : 1.0;
      outer += pw * spectrum.values[k] * eta *
               std::exp(kI * (p_grid.point(k) * z_grid.point(j) - comp.energy() * t));
    }
    outer *= p_grid.step;
    CHECK(std::abs(outer - phi.values[j]) < 1e-10 * (1.0 + std::abs(outer)));
  }
}

TEST_CASE("traversal-resolved pulse: fold over durations recovers the transmitted pulse") {
  // Exact rearrangement of trapz_tau(Phi): assemble with the per-momentum
  // windowed sum rule as the spectral factor.
  const ParticleSpec particle(kEps0, 30.0);
  const BarrierSpec barrier(0.0, 1.0);
  const WavepacketSpec packet(30.0, 1.0, 2.5);
  const UniformGrid p_grid = UniformGrid::over(22.0, 38.0, 97);
  const UniformGrid z_grid = UniformGrid::over(10.5, 15.5, 101);
  const double t = 30.0;
  const WWindow window = WWindow::for_tau_range(0.0, 15.0, 200.0);
  const UniformGrid tau_grid = tau_grid_for_window(window, 200.0);
  ArrayXcd fold_factor(p_grid.count);
  for (Index k = 0; k < p_grid.count; ++k) {
    const ParticleSpec comp(kEps0, p_grid.point(k));
    const TraversalAmplitude eta = eta_numeric(comp, barrier, window, tau_grid);
    fold_factor[k] = integrate_samples(eta.samples());
  }
  const ComplexSamples spectrum = momentum_spectrum(packet, p_grid);
  const ComplexField fold =
      spectral_pulse(spectrum, kEps0, z_grid, t, fold_factor, FieldLabel::transmitted);
  const ComplexField ref =
      transmitted_pulse_spectral(packet, particle, barrier, z_grid, t, p_grid);
  const double num = (fold.values - ref.values).abs2().sum();
  const double den = ref.values.abs2().sum();
  CHECK(std::sqrt(num / den) < 1e-3);
}

TEST_CASE("traversal-resolved pulse: V=0 component near the classical arrival point") {
  const ParticleSpec particle(kEps0, 30.0);
  const BarrierSpec barrier(0.0, 1.0);
  const WavepacketSpec packet(30.0, 1.0, 2.5);
  const UniformGrid p_grid = UniformGrid::over(24.0, 36.0, 145);
  const double t = 30.0;
  const double v0 = particle.group_velocity();
  const double tau = classical_crossing_time(particle, barrier);
  const double z_classical = barrier.width + v0 * (t - tau) - packet.offset;
  const UniformGrid z_grid = UniformGrid::over(z_classical - 3.0, z_classical + 3.0, 301);
  const WWindow window = WWindow::for_tau_range(0.0, 15.0, 50.0);
  const ComplexField phi =
      traversal_resolved_pulse(packet, particle, barrier, tau, z_grid, t, p_grid, window);
  CHECK(std::abs(locate_peak(phi.samples()) - z_classical) < 0.5 * packet.width);
}

TEST_CASE("convolution pulse: delta-spike weight reduces to a shifted envelope") {
  const ParticleSpec particle(kEps0, 30.0);
  const BarrierSpec barrier(0.0, 1.0);
  const WavepacketSpec packet(30.0, 1.0, 2.5);
  const double t = 30.0, tau1 = 2.0;
  const UniformGrid tau_grid = UniformGrid::over(-20.0, 20.0, 4001);
  TraversalAmplitude eta;
  eta.tau_grid = tau_grid;
  eta.values = ArrayXcd::Zero(tau_grid.count);
  Index spike = 0;
  double best = 1e300;
  for (Index i = 0; i < tau_grid.count; ++i) {
    const double d = std::abs(tau_grid.point(i) - tau1);
    if (d < best) {
      best = d;
      spike = i;
    }
  }
  eta.values[spike] = 1.0 / tau_grid.step;  // unit trapezoid mass
  eta.barrier = barrier;
  eta.momentum = 30.0;
  const double v0 = particle.group_velocity();
  const double center = barrier.width + v0 * (t - tau_grid.point(spike)) - packet.offset;
  const UniformGrid z_grid = UniformGrid::over(center - 3.0, center + 3.0, 301);
  const ComplexField conv = convolution_pulse(packet, particle, barrier, z_grid, t, eta);
  double worst = 0.0;
  for (Index j = 0; j < z_grid.count; ++j) {
    const double z = z_grid.point(j);
    const Complex exact =
        packet.envelope(z + packet.offset - barrier.width - v0 * (t - tau_grid.point(spike))) *
        std::exp(kI * (packet.carrier_momentum * z - particle.energy() * t));
    worst = std::max(worst, std::abs(conv.values[j] - exact));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("convolution pulse: free-motion classical translation") {
  const ParticleSpec particle(kEps0, 30.0);
  const BarrierSpec barrier(0.0, 1.0);
  const WavepacketSpec packet(30.0, 1.0, 2.5);
  const double t = 30.0;
  const WWindow window = WWindow::for_tau_range(0.0, 160.0, 40.0);
  const UniformGrid tau_grid = tau_grid_for_window(window, 40.0);
  const TraversalAmplitude eta = eta_numeric(particle, barrier, window, tau_grid);
  const double v0 = particle.group_velocity();
  const double z_classical = v0 * t - packet.offset;
  const UniformGrid z_grid = UniformGrid::over(z_classical - 2.5, z_classical + 2.5, 1001);
  const ComplexField conv = convolution_pulse(packet, particle, barrier, z_grid, t, eta);
  CHECK(std::abs(locate_peak(conv.samples()) - z_classical) < 0.05);
}

TEST_CASE("convolution pulse: rejects an eta grid that misses the stationary region") {
  const ParticleSpec particle(kEps0, 30.0);
  const BarrierSpec barrier(0.0, 1.0);
  const WavepacketSpec packet(30.0, 1.0, 2.5);
  const double t = 30.0;
  const WWindow window = WWindow::for_tau_range(0.0, 160.0, 3.0);
  const UniformGrid tau_grid = tau_grid_for_window(window, 3.0);  // far too short
  const TraversalAmplitude eta = eta_numeric(particle, barrier, window, tau_grid);
  const double v0 = particle.group_velocity();
  const UniformGrid z_grid =
      UniformGrid::over(v0 * t - 2.5 - 2.0, v0 * t - 2.5 + 2.0, 101);
  CHECK_THROWS_WITH_AS(convolution_pulse(packet, particle, barrier, z_grid, t, eta),
                       doctest::Contains("needs tau span"), std::domain_error);
}

TEST_CASE("convolution pulse agrees with the spectral route at desk tunnelling scale") {
  const ParticleSpec particle(kEps0, 30.0);
  const BarrierSpec barrier = barrier_for_kappa(particle, 10.0);
  const WavepacketSpec packet(30.0, 5.0, 11.5);
  const double t = 55.0;
  const UniformGrid p_grid = packet.default_p_grid();
  const UniformGrid z_grid = UniformGrid::over(17.5, 30.0, 1401);
  const ComplexField spectral =
      transmitted_pulse_spectral(packet, particle, barrier, z_grid, t, p_grid);
  const WWindow window = WWindow::for_tau_range(barrier.height, 160.0, 60.0);
  const UniformGrid tau_grid = tau_grid_for_window(window, 60.0);
  const TraversalAmplitude eta = eta_numeric(particle, barrier, window, tau_grid);
  const ComplexField conv = convolution_pulse(packet, particle, barrier, z_grid, t, eta);
  const double cut = 0.5 * spectral.values.abs().maxCoeff();
  double num = 0.0, den = 0.0;
  for (Index i = 0; i < z_grid.count; ++i) {
    if (std::abs(spectral.values[i]) < cut) continue;
    num += std::norm(conv.values[i] - spectral.values[i]);
    den += std::norm(spectral.values[i]);
  }
  CHECK(std::sqrt(num / den) < 0.10);
}

TEST_CASE("semiclassical pulse peaks at the zero-time trajectory point") {
  const ParticleSpec particle(kEps0, 30.0);
  const BarrierSpec barrier = barrier_for_kappa(particle, 10.0);
  const WavepacketSpec packet(30.0, 5.0, 11.5);
  const double t = 55.0;
  const double v0 = particle.group_velocity();
  const double z_zero_time = barrier.width + v0 * t - packet.offset;
  const UniformGrid z_grid = UniformGrid::over(z_zero_time - 6.0, z_zero_time + 6.0, 1201);
  const ComplexField semi = semiclassical_pulse(packet, particle, barrier, z_grid, t);
  CHECK(std::abs(locate_peak(semi.samples()) - z_zero_time) < 1e-2);
  // free motion has no saddle: rejection propagates
  CHECK_THROWS_AS(
      semiclassical_pulse(packet, particle, BarrierSpec(0.0, 1.0), z_grid, t),
      std::domain_error);
}

TEST_CASE("caption-scale tunnelled pulse: amplification, medians, advancement bound") {
  const ParticleSpec particle = ParticleSpec::from_energy(6000.0, 6007.5);
  const BarrierSpec barrier(15.0, 1.0);
  const WavepacketSpec packet(particle.momentum, 0.55, 2.5);
  const double t = 100.0;
  const double sigma = packet.spectral_sigma();
  const UniformGrid p_grid = UniformGrid::over(particle.momentum - 10.0 * sigma,
                                               particle.momentum + 10.0 * sigma, 601);
  const UniformGrid z_grid = UniformGrid::over(2.16, 6.0, 1537);
  const ComplexField free = free_pulse(packet, 6000.0, z_grid, t, p_grid);
  const ComplexField tun =
      transmitted_pulse_spectral(packet, particle, barrier, z_grid, t, p_grid);

  // the transmitted peak amplifies the spectrum tail beyond |T(p0,V)| itself
  const Complex t0 = transmission_exact(particle, barrier.height, barrier);
  const double mag =
      tun.values.abs().maxCoeff() / (std::abs(t0) * free.values.abs().maxCoeff());
  CHECK(mag > 1.0);
  const double predicted = std::exp(std::pow(
      particle.group_velocity() * std::abs(saddle_time(particle, barrier)) / packet.width, 2));
  CHECK(std::abs(mag - predicted) / predicted < 0.20);

  // the transmitted pulse forms from the front part of the initial packet
  const auto z_median = [&](const ComplexField& f) {
    const ArrayXd w = f.values.abs2();
    const double half = 0.5 * w.sum();
    double acc = 0.0;
    for (Index i = 0; i < w.size(); ++i) {
      acc += w[i];
      if (acc >= half) return f.z_grid.point(i);
    }
    return f.z_grid.last();
  };
  CHECK(z_median(tun) > z_median(free));

  // the reshaping never advances beyond the zero-time trajectory plus tolerance
  const double advancement = pulse_advancement(tun, free);
  CHECK(advancement <= 1.15 * barrier.width);
}

TEST_CASE("desk-scale tunnelled advancement stays within the reshaping bound") {
  const ParticleSpec particle(kEps0, 30.0);
  const BarrierSpec barrier = barrier_for_kappa(particle, 10.0);
  const WavepacketSpec packet(30.0, 5.0, 11.5);
  const double t = 55.0;
  const UniformGrid p_grid = packet.default_p_grid();
  const UniformGrid z_grid = UniformGrid::over(12.0, 30.0, 1801);
  const ComplexField free = free_pulse(packet, kEps0, z_grid, t, p_grid);
  const ComplexField tun =
      transmitted_pulse_spectral(packet, particle, barrier, z_grid, t, p_grid);
  const double advancement = pulse_advancement(tun, free);
  CHECK(advancement > 0.0);
  CHECK(advancement <= 1.15 * barrier.width);
}

TEST_CASE("pulse advancement basics") {
  const ParticleSpec particle(kEps0, 30.0);
  const WavepacketSpec packet(30.0, 1.0, 2.5);
  const UniformGrid p_grid = packet.default_p_grid();
  const double t = 30.0, dt = 2.0;
  const double v0 = particle.group_velocity();
  const UniformGrid z_grid = UniformGrid::over(v0 * t - 2.5 - 4.0, v0 * t - 2.5 + 4.0, 801);
  const ComplexField now = free_pulse(packet, kEps0, z_grid, t, p_grid);
  CHECK(pulse_advancement(now, now) == 0.0);
  // a pulse delayed by dt, observed at the same time t
  ComplexField delayed = free_pulse(packet, kEps0, z_grid, t - dt, p_grid);
  delayed.time = t;
  CHECK(std::abs(pulse_advancement(delayed, now) + v0 * dt) < 0.05);
  ComplexField other = free_pulse(packet, kEps0, z_grid, t - dt, p_grid);
  CHECK_THROWS_AS(pulse_advancement(other, now), std::invalid_argument);  // time mismatch
}

TEST_CASE("classical crossing time") {
  // v0 = 0.5 c: eps_p = 2p
  const ParticleSpec slow(std::sqrt(3.0), 1.0);
  CHECK(classical_crossing_time(slow, BarrierSpec(0.0, 1.0)) == doctest::Approx(2.0));
  const ParticleSpec fig = ParticleSpec::from_energy(6000.0, 6007.5);
  CHECK(classical_crossing_time(fig, BarrierSpec(15.0, 1.0)) ==
        doctest::Approx(testsup::kFigCrossing).epsilon(1e-10));
}

TEST_CASE("causality: truncated front stays inside the light cone") {
  const ParticleSpec particle(kEps0, 30.0);
  const BarrierSpec barrier = barrier_for_kappa(particle, 10.0);
  const WavepacketSpec packet(30.0, 3.0, 16.0);
  const double t = 60.0;
  CausalitySetup setup;
  setup.cutoff = 4.0 * packet.width;
  setup.margin = setup.cutoff + 0.5;
  const Index np = static_cast<Index>(std::ceil(24.0 / 0.005)) + 1;
  setup.p_grid = UniformGrid::over(30.0 - 12.0, 30.0 + 12.0, np);
  setup.envelope_step = 0.005;
  const UniformGrid z_grid = UniformGrid::over(2.0, 62.0, 1501);

  const CausalityReport rep =
      causality_experiment(packet, particle, barrier, setup, z_grid, t);
  CHECK(rep.leakage_ratio < 1e-4);
  CHECK(rep.smoothing_width == doctest::Approx(packet.width / 20.0));
  CHECK(rep.front_position == doctest::Approx(setup.cutoff - packet.offset + t));

  const CausalityReport rep_free =
      causality_experiment(packet, particle, BarrierSpec(0.0, 1.0), setup, z_grid, t);
  CHECK(rep_free.leakage_ratio < 1e-4);

  // untruncated gaussian reference: finite but reported, not judged
  const ComplexField untr =
      transmitted_pulse_spectral(packet, particle, barrier, z_grid, t, setup.p_grid);
  double beyond = 0.0;
  for (Index i = 0; i < z_grid.count; ++i)
    if (z_grid.point(i) > rep.region_start) beyond = std::max(beyond, std::abs(untr.values[i]));
  CHECK(beyond > 0.0);

  // cutoff below 3 dz is rejected
  CausalitySetup bad = setup;
  bad.cutoff = 2.0 * packet.width;
  CHECK_THROWS_AS(causality_experiment(packet, particle, barrier, bad, z_grid, t),
                  std::invalid_argument);
}

TEST_CASE("packet validation") {
  CHECK_THROWS_AS(WavepacketSpec(30.0, -1.0, 2.5), std::invalid_argument);
  CHECK_THROWS_AS(WavepacketSpec(30.0, 1.0, 0.0), std::invalid_argument);
  const ParticleSpec particle(kEps0, 30.0);
  const WavepacketSpec close(30.0, 1.0, 1.0);  // z0 < 2b
  CHECK_THROWS_AS(
      transmitted_pulse_spectral(close, particle, BarrierSpec(1.0, 1.0),
                                 UniformGrid::over(5.0, 10.0, 11), 10.0,
                                 close.default_p_grid()),
      std::invalid_argument);
}
