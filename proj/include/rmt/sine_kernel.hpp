#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "rmt/observable.hpp"
#include "rmt/quadrature.hpp"
#include "rmt/types.hpp"

namespace rmt {

// K(x) = sin(pi x) / (pi x), the universal bulk kernel. Below |x| = 1e-6 the
// Taylor form 1 - (pi x)^2/6 + (pi x)^4/120 avoids the 0/0 cancellation.
inline double sine_kernel(double x) {
  const double y = std::numbers::pi * x;
  if (std::abs(x) < 1e-6) {
    const double y2 = y * y;
    return 1.0 - y2 / 6.0 + y2 * y2 / 120.0;
  }
  return std::sin(y) / y;
}

// The k x k matrix K_ij = K(alpha_i - alpha_j).
template <class Derived>
RealMatrix sine_kernel_matrix(const Eigen::DenseBase<Derived>& alphas) {
  const Index k = alphas.size();
  RealMatrix m(k, k);
  for (Index i = 0; i < k; ++i) {
    m(i, i) = 1.0;
    for (Index j = 0; j < i; ++j) {
      const double v = sine_kernel(alphas(i) - alphas(j));
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return m;
}

// det K(alpha_i - alpha_j) by pivoted elimination.
template <class Derived>
double sine_kernel_determinant(const Eigen::DenseBase<Derived>& alphas) {
  if (alphas.size() < 1)
    throw ValidationError("sine_kernel_determinant: k >= 1 required");
  if (alphas.size() == 1) return 1.0;
  return Eigen::PartialPivLU<RealMatrix>(sine_kernel_matrix(alphas))
      .determinant();
}

// The universal limit of a k-point statistic: the integral of
// O(alpha) det(K(alpha_i - alpha_j)) over the observable's support box.
struct PredictedStatistic {
  int k;
  double value;
  double quadrature_error;
};

inline long default_prediction_cell_budget(int k) {
  switch (k) {
    case 1: return 20000;
    case 2: return 60000;
    default: return 200000;
  }
}

inline PredictedStatistic predicted_statistic(
    const Observable& observable, int k, double tol, long max_cells = 0) {
  if (k != observable.arity())
    throw ValidationError("predicted_statistic: k must equal the observable arity");
  if (k < 1 || k > 3)
    throw ValidationError("predicted_statistic: k in {1, 2, 3} supported");
  if (max_cells <= 0) max_cells = default_prediction_cell_budget(k);

  std::array<double, 3> lo{}, hi{};
  for (int d = 0; d < k; ++d) {
    lo[d] = observable.support_lo(d);
    hi[d] = observable.support_hi(d);
  }

  QuadratureResult q{0.0, 0.0, 0, 0};
  if (k == 1) {
    // One-point determinant is identically K(0) = 1.
    q = integrate_adaptive([&](const double* x) { return observable(x); }, 1,
                           lo.data(), hi.data(), tol, max_cells);
  } else {
    RealMatrix kernel(k, k);
    Eigen::PartialPivLU<RealMatrix> lu(k);
    auto integrand = [&](const double* x) {
      const double o = observable(x);
      if (o == 0.0) return 0.0;
      for (int i = 0; i < k; ++i) {
        kernel(i, i) = 1.0;
        for (int j = 0; j < i; ++j) {
          const double v = sine_kernel(x[i] - x[j]);
          kernel(i, j) = v;
          kernel(j, i) = v;
        }
      }
      lu.compute(kernel);
      return o * lu.determinant();
    };
    q = integrate_adaptive(integrand, k, lo.data(), hi.data(), tol, max_cells);
  }
  return PredictedStatistic{k, q.value, q.error_estimate};
}

}  // namespace rmt
