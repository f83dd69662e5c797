#pragma once

// Shared test fixtures: frozen reference values and independent oracles.
// The oracles here deliberately avoid the library's closed forms.

#include <complex>
#include <random>

#include <Eigen/Dense>

#include "tunneltime/barrier.hpp"

namespace testsup {

using tunneltime::Complex;

// ---- frozen reference values (computed once with independent tooling) ----

// sqrt(pi) to full double precision
inline constexpr double kSqrtPi = 1.7724538509055160273;

// Transfer-matrix transmission/reflection for eps0=4, p=3, W=0.8, b=1
inline const Complex kTransferT{-0.05211034384620947, -0.7348847743967294};
inline const Complex kTransferR{-0.6744934106016762, 0.04782801981073718};

// Closed-form saddle amplitude at eps0=50, p=30, V=0, tau=2 (40-digit evaluation)
inline const Complex kEta14Ref{-0.71275702214473105, -1.01109505440367033};

// Figure-scale caption arithmetic: eps0 = 6000, eps_p = 6007.5, V = 15, b = 1
inline constexpr double kFigP0 = 300.093735356;        // sqrt(6007.5^2 - 6000^2)
inline constexpr double kFigV0 = 0.049953181083;       // p0 / eps_p
inline constexpr double kFigCrossing = 20.0187451193;  // b / v0
inline constexpr double kFigKappaB = 299.906235347;    // sqrt(6000^2 - 5992.5^2)
inline constexpr double kFigTauV = 19.9812451151;      // 5992.5 / kappa
inline constexpr double kFigLogT = -299.213088362;     // log|T| at the caption point
inline constexpr double kFigPrefactor = 1.99999960937; // 4 p kappa / (p^2 + kappa^2)
inline constexpr double kFigMagnification = 26.9345981423;  // exp((v0 tau_V / dz)^2)

// ---- independent transfer-matrix oracle (2x2 interface/solve route) ----

inline Eigen::Matrix2cd interface_to(double z, Complex k_from, Complex k_to) {
  const Complex i{0.0, 1.0};
  Eigen::Matrix2cd to_side, from_side;
  to_side << std::exp(i * k_to * z), std::exp(-i * k_to * z),
      i * k_to * std::exp(i * k_to * z), -i * k_to * std::exp(-i * k_to * z);
  from_side << std::exp(i * k_from * z), std::exp(-i * k_from * z),
      i * k_from * std::exp(i * k_from * z), -i * k_from * std::exp(-i * k_from * z);
  return to_side.colPivHouseholderQr().solve(from_side);
}

struct TransferResult {
  Complex transmission;
  Complex reflection;
};

inline TransferResult transfer_matrix_oracle(double eps0, double p, double w_strength,
                                             double b) {
  const double eps_p = std::hypot(p, eps0);
  const Complex k = tunneltime::wavevector_inside(eps_p, w_strength, eps0);
  const double a = 0.5 * b;
  const Eigen::Matrix2cd m =
      interface_to(a, k, Complex(p)) * interface_to(-a, Complex(p), k);
  // (1, R) on the left maps to (t, 0) on the right.
  const Complex r = -m(1, 0) / m(1, 1);
  const Complex t = m(0, 0) + m(0, 1) * r;
  return {t, r};
}

inline std::mt19937& rng() {
  static std::mt19937 gen(0x5eed1234u);
  return gen;
}

}  // namespace testsup
