#include "tunneltime/weakmeas.hpp"

#include <cmath>
#include <sstream>

namespace tunneltime {

WeakMeterSpec::WeakMeterSpec(ArrayXd eigenvalues_, ArrayXcd preselect_, ArrayXcd postselect_,
                             double pointer_width_)
    : eigenvalues(std::move(eigenvalues_)),
      preselect(std::move(preselect_)),
      postselect(std::move(postselect_)),
      pointer_width(pointer_width_) {
  const Index n = eigenvalues.size();
  if (n < 2) throw std::invalid_argument("WeakMeterSpec: needs N >= 2 eigenvalues");
  if (preselect.size() != n || postselect.size() != n)
    throw std::invalid_argument("WeakMeterSpec: state dimensions must match eigenvalue count");
  if ((eigenvalues < 0.0).any() || (eigenvalues > 1.0).any())
    throw std::invalid_argument("WeakMeterSpec: eigenvalues must lie in [0, 1]");
  if (!(pointer_width > 0.0))
    throw std::invalid_argument("WeakMeterSpec: pointer width must be positive");
  const double na = std::sqrt(preselect.abs2().sum());
  const double nb = std::sqrt(postselect.abs2().sum());
  if (!(na > 0.0) || !(nb > 0.0))
    throw std::invalid_argument("WeakMeterSpec: states must be nonzero");
  preselect /= na;
  postselect /= nb;
  if (std::abs(overlap()) == 0.0)
    throw std::invalid_argument("WeakMeterSpec: orthogonal postselection (<F|I> = 0)");
}

WeakMeterSpec WeakMeterSpec::two_level_anomalous(double alpha, double pointer_width) {
  if (alpha == 0.0) throw std::invalid_argument("two_level_anomalous: alpha must be nonzero");
  ArrayXd a_vals(2);
  a_vals << 0.0, 1.0;
  ArrayXcd pre(2);
  pre << Complex(M_SQRT1_2), Complex(M_SQRT1_2);
  // weights eta = (b0* a0, b1* a1); alpha = eta1/(eta0 + eta1) solved by
  // b* proportional to ((1 - alpha)/alpha, 1).
  ArrayXcd post(2);
  post << Complex((1.0 - alpha) / alpha), Complex(1.0);
  return WeakMeterSpec(std::move(a_vals), std::move(pre), std::move(post), pointer_width);
}

ComplexSamples pointer_final_state(const WeakMeterSpec& meter, const UniformGrid& tau_grid) {
  const Complex alpha = weak_value(meter);
  const double reach = 4.0 * meter.pointer_width;
  const double lo = std::min(meter.eigenvalues.minCoeff(), alpha.real()) - reach;
  const double hi = std::max(meter.eigenvalues.maxCoeff(), alpha.real()) + reach;
  if (tau_grid.start > lo || tau_grid.last() < hi) {
    std::ostringstream msg;
    msg << "pointer_final_state: grid must cover [" << lo << ", " << hi << "]";
    throw std::invalid_argument(msg.str());
  }
  const ArrayXcd eta = meter.weights();
  ArrayXcd out = ArrayXcd::Zero(tau_grid.count);
  for (Index i = 0; i < meter.eigenvalues.size(); ++i) {
    const double a_i = meter.eigenvalues[i];
    for (Index j = 0; j < tau_grid.count; ++j)
      out[j] += eta[i] * meter.pointer(Complex(tau_grid.point(j) - a_i));
  }
  return ComplexSamples(tau_grid, std::move(out));
}

Complex weak_value(const WeakMeterSpec& meter) {
  const ArrayXcd eta = meter.weights();
  const Complex denom = eta.sum();
  if (std::abs(denom) == 0.0)
    throw std::domain_error("weak_value: orthogonal postselection");
  return (meter.eigenvalues.cast<Complex>() * eta).sum() / denom;
}

GaussianFit gaussian_shift_fit(const ComplexSamples& state, double pointer_width) {
  if (!(pointer_width > 0.0))
    throw std::invalid_argument("gaussian_shift_fit: pointer width must be positive");
  const double norm = state.values.abs().maxCoeff();
  if (!(norm > 0.0)) throw std::domain_error("gaussian_shift_fit: flat state");

  const UniformGrid& g = state.grid;
  const ArrayXd taus = g.points();
  const Complex denom = trapezoid(g, state.values);
  if (std::abs(denom) < 1e-300 * norm)
    throw std::domain_error("gaussian_shift_fit: degenerate fit (vanishing zeroth moment)");

  // Moment seed: for an exact c G(tau - alpha) the first-moment ratio is alpha.
  Complex alpha = trapezoid(g, taus.cast<Complex>() * state.values) / denom;

  const auto model = [&](Complex a) {
    ArrayXcd m(g.count);
    for (Index j = 0; j < g.count; ++j) {
      const Complex u = taus[j] - a;
      m[j] = std::exp(-u * u / (pointer_width * pointer_width));
    }
    return m;
  };
  const auto scale_for = [&](const ArrayXcd& m) {
    const Complex num = (m.conjugate() * state.values).sum();
    const double den = m.abs2().sum();
    return num / den;
  };

  // Gauss-Newton on the complex shift.
  Complex c(0.0);
  for (int iter = 0; iter < 40; ++iter) {
    const ArrayXcd m = model(alpha);
    c = scale_for(m);
    const ArrayXcd r = state.values - c * m;
    // d model / d alpha = 2 (tau - alpha)/sigma^2 * G
    ArrayXcd jac(g.count);
    for (Index j = 0; j < g.count; ++j) {
      const Complex u = taus[j] - alpha;
      jac[j] = c * 2.0 * u / (pointer_width * pointer_width) * m[j];
    }
    const double jj = jac.abs2().sum();
    if (!(jj > 0.0)) break;
    const Complex step = (jac.conjugate() * r).sum() / jj;
    alpha += step;
    if (std::abs(step) < 1e-14 * (1.0 + std::abs(alpha))) break;
  }
  const ArrayXcd m = model(alpha);
  c = scale_for(m);
  const ArrayXcd r = state.values - c * m;
  const double residual = std::sqrt(r.abs2().sum() / state.values.abs2().sum());
  return GaussianFit{alpha, c, residual};
}

}  // namespace tunneltime
