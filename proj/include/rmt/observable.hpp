#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "rmt/types.hpp"

namespace rmt {

// The standard mollifier bump: exp(1 - 1/(1-x^2)) on |x| < 1, zero outside.
// Smooth, bounded by 1, compactly supported.
inline double bump(double x) {
  const double d = 1.0 - x * x;
  if (d <= 0.0) return 0.0;
  return std::exp(1.0 - 1.0 / d);
}

// Compactly supported test function on R^k: a product of translated/scaled
// bumps, O(alpha) = amplitude * prod_j bump((alpha_j - c_j) / w_j), with the
// explicit support box  x_j [c_j - w_j, c_j + w_j].
class Observable {
 public:
  Observable(RealVector centers, RealVector half_widths, double amplitude = 1.0)
      : centers_(std::move(centers)),
        half_widths_(std::move(half_widths)),
        amplitude_(amplitude) {
    if (centers_.size() < 1 || centers_.size() != half_widths_.size())
      throw ValidationError("observable: centers/half_widths size mismatch");
    if (half_widths_.minCoeff() <= 0.0)
      throw ValidationError("observable: half-widths must be positive");
    if (!(amplitude_ >= 0.0 && amplitude_ <= 1.0))
      throw ValidationError(
          "observable: amplitude must lie in [0, 1] so that |O| <= 1");
  }

  // k identical axes centered at c with half-width w.
  static Observable product_bump(int k, double center, double half_width,
                                 double amplitude = 1.0) {
    if (k < 1) throw ValidationError("observable: arity >= 1 required");
    return Observable(RealVector::Constant(k, center),
                      RealVector::Constant(k, half_width), amplitude);
  }

  int arity() const { return static_cast<int>(centers_.size()); }
  double amplitude() const { return amplitude_; }
  double center(int axis) const { return centers_[axis]; }
  double half_width(int axis) const { return half_widths_[axis]; }
  double support_lo(int axis) const { return centers_[axis] - half_widths_[axis]; }
  double support_hi(int axis) const { return centers_[axis] + half_widths_[axis]; }

  double operator()(const double* alpha) const {
    double v = amplitude_;
    for (int j = 0; j < arity() && v != 0.0; ++j)
      v *= bump((alpha[j] - centers_[j]) / half_widths_[j]);
    return v;
  }

  double operator()(const RealVector& alpha) const {
    if (alpha.size() != centers_.size())
      throw ValidationError("observable: argument arity mismatch");
    return (*this)(alpha.data());
  }

  // Compact tag for CSV rows, e.g. "bump_k2_c0_w3".
  std::string id() const {
    std::ostringstream os;
    os << "bump_k" << arity() << "_c" << centers_[0] << "_w" << half_widths_[0];
    if (amplitude_ != 1.0) os << "_a" << amplitude_;
    return os.str();
  }

 private:
  RealVector centers_;
  RealVector half_widths_;
  double amplitude_;
};

}  // namespace rmt
