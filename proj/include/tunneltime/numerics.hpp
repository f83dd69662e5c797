#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace tunneltime {

using Complex = std::complex<double>;
using Eigen::ArrayXcd;
using Eigen::ArrayXd;
using Eigen::Index;

inline constexpr Complex kI{0.0, 1.0};

/// Thrown by locate_peak when |values| attains its maximum on the grid
/// boundary and no interior refinement is possible.
struct boundary_peak_error : std::runtime_error {
  explicit boundary_peak_error(const std::string& what) : std::runtime_error(what) {}
};

/// Uniform sampling axis. point(i) = start + i*step, reproducible exactly.
struct UniformGrid {
  double start = 0.0;
  double step = 1.0;
  Index count = 2;

  UniformGrid() = default;
  UniformGrid(double start_, double step_, Index count_);

  /// Grid spanning [lo, hi] inclusive with `count` points.
  static UniformGrid over(double lo, double hi, Index count);

  double point(Index i) const { return start + static_cast<double>(i) * step; }
  double last() const { return point(count - 1); }
  double span() const { return step * static_cast<double>(count - 1); }
  double center() const { return start + 0.5 * span(); }
  ArrayXd points() const;

  bool operator==(const UniformGrid& o) const {
    return start == o.start && step == o.step && count == o.count;
  }
};

/// Complex samples bound to a uniform grid.
struct ComplexSamples {
  UniformGrid grid;
  ArrayXcd values;

  ComplexSamples() = default;
  ComplexSamples(UniformGrid g, ArrayXcd v);
};

/// Edge apodization applied before windowed Fourier transforms.
struct Apodization {
  enum class Kind { none, cosine_taper };
  Kind kind = Kind::none;
  double fraction = 0.0;  // edge fraction per side, in (0, 0.5] for cosine_taper

  static Apodization none() { return {}; }
  static Apodization cosine_taper(double f);
  bool is_none() const { return kind == Kind::none; }
};

/// Taper weights for an n-point grid (raised-cosine ramps over the edge fraction).
ArrayXd taper_weights(Index n, const Apodization& apod);

/// Composite trapezoid over the grid span. Expression-friendly core.
template <typename Derived>
Complex trapezoid(const UniformGrid& grid, const Eigen::ArrayBase<Derived>& values) {
  if (values.size() != grid.count)
    throw std::invalid_argument("trapezoid: values length does not match grid count");
  Complex s = values.sum();
  s -= 0.5 * (Complex(values[0]) + Complex(values[values.size() - 1]));
  return s * grid.step;
}

/// Trapezoidal integral of the samples; rejects non-finite input.
Complex integrate_samples(const ComplexSamples& samples);

/// (2*pi)^{-1/2} * integral over the W grid of exp(i*W*tau) * taper(W) * f(W),
/// sampled on tau_grid. Linear in the input samples.
ComplexSamples windowed_fourier(const ComplexSamples& samples_over_w,
                                const UniformGrid& tau_grid,
                                const Apodization& apodization);

/// Abscissa of the maximum of |values|, refined by a 3-point parabola.
/// Throws boundary_peak_error when the discrete argmax is a boundary point.
double locate_peak(const ComplexSamples& samples);
double locate_peak(const UniformGrid& grid, const ArrayXd& magnitudes);

/// Boxcar (moving-average) smoothing of complex samples, half width in grid units.
ComplexSamples boxcar_smooth(const ComplexSamples& samples, double half_width);

}  // namespace tunneltime
