#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include <Eigen/Dense>

#include "rmt/types.hpp"

namespace rmt {

// The N x N array of entry variances sigma_ij^2 with its bound delta.
// Invariants (validated on construction, never repaired):
//   * symmetry: sigma_ij^2 == sigma_ji^2 exactly,
//   * unit row sums: sum_j sigma_ij^2 = 1 within 1e-10,
//   * strict bounds: delta < N sigma_ij^2 < 1/delta for all i, j.
class VarianceProfile {
 public:
  static constexpr double kRowSumTol = 1e-10;

  VarianceProfile(RealMatrix variances, double delta)
      : variances_(std::move(variances)), delta_(delta) {
    const Index n = variances_.rows();
    if (n < 1 || variances_.cols() != n)
      throw ValidationError("variance profile: matrix must be square, N >= 1");
    if (!(delta_ > 0.0))
      throw ValidationError("variance profile: delta must be positive");
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < i; ++j)
        if (variances_(i, j) != variances_(j, i))
          throw ValidationError(violation(i, j, "sigma_ij^2 == sigma_ji^2"));
    for (Index i = 0; i < n; ++i) {
      const double rs = variances_.row(i).sum();
      if (std::abs(rs - 1.0) > kRowSumTol) {
        std::ostringstream os;
        os << "variance profile: row " << i << " sums to " << rs
           << ", violates |sum_j sigma_ij^2 - 1| <= 1e-10";
        throw ValidationError(os.str());
      }
    }
    const double dn = static_cast<double>(n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) {
        const double scaled = dn * variances_(i, j);
        if (!(scaled > delta_))
          throw ValidationError(violation(i, j, "delta < N sigma_ij^2"));
        if (!(scaled < 1.0 / delta_))
          throw ValidationError(violation(i, j, "N sigma_ij^2 < 1/delta"));
      }
  }

  Index size() const { return variances_.rows(); }
  const RealMatrix& variances() const { return variances_; }
  double delta() const { return delta_; }

  double operator()(Index i, Index j) const { return variances_(i, j); }

  // Extremes of N sigma_ij^2 over all entries (exhaustive scan).
  std::pair<double, double> scaled_range() const {
    const double n = static_cast<double>(size());
    return {n * variances_.minCoeff(), n * variances_.maxCoeff()};
  }

 private:
  static std::string violation(Index i, Index j, const char* inequality) {
    std::ostringstream os;
    os << "variance profile: entry (" << i << "," << j << ") violates "
       << inequality;
    return os.str();
  }

  RealMatrix variances_;
  double delta_;
};

namespace detail {

// Largest delta compatible with the scanned profile, shaved by 10% so the
// strict inequalities hold with slack.
inline double delta_with_margin(const RealMatrix& variances) {
  const Index n = variances.rows();
  const double dn = static_cast<double>(n);
  double m = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      const double s = dn * variances(i, j);
      if (s <= 0.0)
        throw ValidationError(
            "variance profile: N sigma_ij^2 <= 0, violates N sigma_ij^2 > 0");
      m = std::min(m, std::min(s, 1.0 / s));
    }
  return 0.9 * m;
}

}  // namespace detail

// sigma_ij^2 = 1/N: the standard Wigner normalization E|h_ij|^2 = 1/N.
inline VarianceProfile flat_profile(Index n) {
  if (n < 1) throw ValidationError("flat profile: N >= 1 required");
  RealMatrix v = RealMatrix::Constant(n, n, 1.0 / static_cast<double>(n));
  const double delta = detail::delta_with_margin(v);  // = 0.9 for the flat case
  return VarianceProfile(std::move(v), delta);
}

// Circulant band: sigma_ij^2 = f((i-j) mod N) with f symmetric around N/2,
// raised by the factor (1+contrast) at circular distance <= half_width and
// lowered outside so that sum_k f(k) = 1. Every row of a circulant sums to
// the same value, so unit row sums hold by construction.
inline VarianceProfile circulant_band_profile(Index n, Index half_width,
                                              double contrast) {
  if (n < 1) throw ValidationError("circulant band: N >= 1 required");
  if (half_width < 1 || 2 * half_width > n)
    throw ValidationError("circulant band: need 1 <= w <= N/2");
  if (!(contrast >= 0.0 && contrast < 1.0))
    throw ValidationError("circulant band: need 0 <= c < 1");

  const double dn = static_cast<double>(n);
  Index inside = 0;
  for (Index k = 0; k < n; ++k)
    if (std::min(k, n - k) <= half_width) ++inside;
  const Index outside = n - inside;

  const double f_in = (1.0 + contrast) / dn;
  double f_out = 0.0;
  if (outside > 0) {
    f_out = (1.0 - static_cast<double>(inside) * f_in) /
            static_cast<double>(outside);
    if (f_out <= 0.0)
      throw ValidationError(
          "circulant band: contrast leaves N sigma_ij^2 <= 0 outside the band, "
          "violates N sigma_ij^2 > 0");
  } else if (contrast != 0.0) {
    throw ValidationError(
        "circulant band: band covers the whole row; only c = 0 is consistent "
        "with unit row sums");
  }

  RealMatrix v(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      const Index k = (i - j + n) % n;
      v(i, j) = std::min(k, n - k) <= half_width ? f_in : f_out;
    }
  const double delta = detail::delta_with_margin(v);
  return VarianceProfile(std::move(v), delta);
}

enum class ProfileKind { Flat, CirculantBand };

struct ProfileParams {
  Index half_width = 0;  // circulant band only
  double contrast = 0.0;
};

inline VarianceProfile make_variance_profile(ProfileKind kind, Index n,
                                             ProfileParams params = {}) {
  switch (kind) {
    case ProfileKind::Flat: return flat_profile(n);
    case ProfileKind::CirculantBand:
      return circulant_band_profile(n, params.half_width, params.contrast);
  }
  throw ValidationError("make_variance_profile: unknown profile kind");
}

}  // namespace rmt
