#pragma once

#include "tunneltime/numerics.hpp"

namespace tunneltime {

/// Von Neumann meter with pre/postselection. Pointer G(tau) = exp(-tau^2/sigma^2).
struct WeakMeterSpec {
  ArrayXd eigenvalues;   // A_i in [0, 1], N >= 2
  ArrayXcd preselect;    // a_i, normalized on construction
  ArrayXcd postselect;   // b_i, normalized on construction
  double pointer_width;  // sigma_G > 0

  WeakMeterSpec(ArrayXd eigenvalues_, ArrayXcd preselect_, ArrayXcd postselect_,
                double pointer_width_);

  /// eta_i = conj(b_i) a_i
  ArrayXcd weights() const { return postselect.conjugate() * preselect; }
  /// <F|I> = sum_i eta_i
  Complex overlap() const { return weights().sum(); }
  Complex pointer(Complex tau) const {
    return std::exp(-tau * tau / (pointer_width * pointer_width));
  }

  /// N = 2, A = {0, 1} meter tuned so the weak value equals alpha.
  static WeakMeterSpec two_level_anomalous(double alpha, double pointer_width);
};

/// Unnormalized pointer state sum_i G(tau - A_i) eta_i on the grid.
/// Grid must span all A_i and the weak-value shift by >= 4 sigma_G.
ComplexSamples pointer_final_state(const WeakMeterSpec& meter, const UniformGrid& tau_grid);

/// alpha = sum A_i eta_i / sum eta_i.
Complex weak_value(const WeakMeterSpec& meter);

struct GaussianFit {
  Complex shift;    // alpha
  Complex scale;    // c
  double residual;  // relative L2 of state - c G(tau - alpha)
};

/// Least-squares fit of c * G(tau - alpha) over complex c and alpha
/// (moment-seeded Gauss-Newton).
GaussianFit gaussian_shift_fit(const ComplexSamples& state, double pointer_width);

}  // namespace tunneltime
