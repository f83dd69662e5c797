#include "tunneltime/numerics.hpp"

#include <cmath>
#include <sstream>

namespace tunneltime {

UniformGrid::UniformGrid(double start_, double step_, Index count_)
    : start(start_), step(step_), count(count_) {
  if (!(step > 0.0) || !std::isfinite(step))
    throw std::invalid_argument("UniformGrid: step must be positive and finite");
  if (count < 2) throw std::invalid_argument("UniformGrid: count must be >= 2");
  if (!std::isfinite(start)) throw std::invalid_argument("UniformGrid: start must be finite");
}

UniformGrid UniformGrid::over(double lo, double hi, Index count) {
  if (count < 2) throw std::invalid_argument("UniformGrid::over: count must be >= 2");
  if (!(hi > lo)) throw std::invalid_argument("UniformGrid::over: hi must exceed lo");
  return UniformGrid(lo, (hi - lo) / static_cast<double>(count - 1), count);
}

ArrayXd UniformGrid::points() const {
  ArrayXd p(count);
  for (Index i = 0; i < count; ++i) p[i] = point(i);
  return p;
}

ComplexSamples::ComplexSamples(UniformGrid g, ArrayXcd v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.count)
    throw std::invalid_argument("ComplexSamples: values length does not match grid count");
}

Apodization Apodization::cosine_taper(double f) {
  if (!(f > 0.0) || f > 0.5)
    throw std::invalid_argument("Apodization: cosine taper fraction must be in (0, 0.5]");
  Apodization a;
  a.kind = Kind::cosine_taper;
  a.fraction = f;
  return a;
}

ArrayXd taper_weights(Index n, const Apodization& apod) {
  ArrayXd w = ArrayXd::Ones(n);
  if (apod.is_none()) return w;
  const Index m = static_cast<Index>(std::floor(apod.fraction * static_cast<double>(n - 1)));
  if (m <= 0) return w;
  for (Index i = 0; i <= m; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(m);
    const double ramp = 0.5 * (1.0 - std::cos(M_PI * x));
    w[i] = ramp;
    w[n - 1 - i] = ramp;
  }
  return w;
}

Complex integrate_samples(const ComplexSamples& samples) {
  const ArrayXcd& v = samples.values;
  for (Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i].real()) || !std::isfinite(v[i].imag())) {
      std::ostringstream msg;
      msg << "integrate_samples: non-finite value at index " << i
          << " (abscissa " << samples.grid.point(i) << ")";
      throw std::invalid_argument(msg.str());
    }
  }
  return trapezoid(samples.grid, v);
}

namespace {
constexpr Index kRotorAnchorStride = 64;
}

ComplexSamples windowed_fourier(const ComplexSamples& samples_over_w,
                                const UniformGrid& tau_grid,
                                const Apodization& apodization) {
  const UniformGrid& wg = samples_over_w.grid;
  const double w_abs_max = std::max(std::abs(wg.start), std::abs(wg.last()));

  // Aliasing bound of the discrete W sum: |tau| beyond pi/dW wraps around.
  const double tau_abs_max =
      std::max(std::abs(tau_grid.start), std::abs(tau_grid.last()));
  const double tau_resolvable = M_PI / wg.step;
  if (tau_abs_max > tau_resolvable) {
    std::ostringstream msg;
    msg << "windowed_fourier: tau grid reaches |tau| = " << tau_abs_max
        << " but the W spacing resolves only |tau| <= " << tau_resolvable;
    throw std::invalid_argument(msg.str());
  }
  // The tau sampling must resolve the fastest phase factor exp(i W_max tau).
  if (w_abs_max > 0.0 && tau_grid.step > M_PI / w_abs_max) {
    std::ostringstream msg;
    msg << "windowed_fourier: tau step " << tau_grid.step
        << " undersamples the window (needs <= " << M_PI / w_abs_max << ")";
    throw std::invalid_argument(msg.str());
  }

  for (Index i = 0; i < wg.count; ++i) {
    const Complex v = samples_over_w.values[i];
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      std::ostringstream msg;
      msg << "windowed_fourier: non-finite sample at W = " << wg.point(i);
      throw std::invalid_argument(msg.str());
    }
  }

  const Index nw = wg.count;
  ArrayXcd coeff = samples_over_w.values;
  const ArrayXd taper = taper_weights(nw, apodization);
  coeff *= taper.cast<Complex>();
  coeff[0] *= 0.5;
  coeff[nw - 1] *= 0.5;
  coeff *= wg.step / std::sqrt(2.0 * M_PI);

  const ArrayXd w_points = wg.points();
  ArrayXcd rotor(nw), phase(nw);
  for (Index k = 0; k < nw; ++k) rotor[k] = std::exp(kI * (w_points[k] * tau_grid.step));

  // Phase recurrence along tau with periodic exact re-anchoring.
  ArrayXcd out(tau_grid.count);
  for (Index j = 0; j < tau_grid.count; ++j) {
    if (j % kRotorAnchorStride == 0) {
      const double tau = tau_grid.point(j);
      for (Index k = 0; k < nw; ++k) phase[k] = std::exp(kI * (w_points[k] * tau));
    } else {
      phase *= rotor;
    }
    out[j] = (coeff * phase).sum();
  }
  return ComplexSamples(tau_grid, std::move(out));
}

double locate_peak(const UniformGrid& grid, const ArrayXd& magnitudes) {
  if (magnitudes.size() != grid.count)
    throw std::invalid_argument("locate_peak: magnitudes length does not match grid");
  if (grid.count < 3) throw std::invalid_argument("locate_peak: needs at least 3 points");
  Index imax = 0;
  magnitudes.maxCoeff(&imax);
  if (imax == 0 || imax == grid.count - 1) {
    std::ostringstream msg;
    msg << "locate_peak: maximum on grid boundary at " << grid.point(imax);
    throw boundary_peak_error(msg.str());
  }
  const double y0 = magnitudes[imax - 1], y1 = magnitudes[imax], y2 = magnitudes[imax + 1];
  const double denom = y0 - 2.0 * y1 + y2;
  const double offset = (denom != 0.0) ? 0.5 * (y0 - y2) / denom : 0.0;
  return grid.point(imax) + offset * grid.step;
}

double locate_peak(const ComplexSamples& samples) {
  return locate_peak(samples.grid, samples.values.abs());
}

ComplexSamples boxcar_smooth(const ComplexSamples& samples, double half_width) {
  if (!(half_width > 0.0))
    throw std::invalid_argument("boxcar_smooth: half width must be positive");
  const Index n = samples.grid.count;
  const Index m = static_cast<Index>(std::lround(half_width / samples.grid.step));
  if (m < 1) return samples;
  std::vector<Complex> prefix(static_cast<size_t>(n) + 1, Complex(0.0));
  for (Index i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + samples.values[i];
  ArrayXcd out(n);
  for (Index i = 0; i < n; ++i) {
    const Index lo = std::max<Index>(0, i - m);
    const Index hi = std::min<Index>(n - 1, i + m);
    out[i] = (prefix[hi + 1] - prefix[lo]) / static_cast<double>(hi - lo + 1);
  }
  return ComplexSamples(samples.grid, std::move(out));
}

}  // namespace tunneltime
