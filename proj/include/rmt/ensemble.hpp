#pragma once

#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "rmt/entry_distribution.hpp"
#include "rmt/rng.hpp"
#include "rmt/types.hpp"
#include "rmt/variance_profile.hpp"

namespace rmt {

// Dense Hermitian matrix with the symmetry baked in at construction:
// h_ji = conj(h_ij) bit-exactly and Im h_ii = 0.
class HermitianMatrix {
 public:
  // Validating constructor for externally supplied data.
  static HermitianMatrix from_matrix(ComplexMatrix m) {
    const Index n = m.rows();
    if (n != m.cols()) throw ValidationError("hermitian matrix must be square");
    for (Index i = 0; i < n; ++i) {
      if (m(i, i).imag() != 0.0)
        throw ValidationError("hermitian matrix: diagonal must be real");
      for (Index j = i + 1; j < n; ++j)
        if (m(j, i) != std::conj(m(i, j)))
          throw ValidationError("hermitian matrix: h_ji != conj(h_ij)");
    }
    return HermitianMatrix(std::move(m));
  }

  // For samplers that fill the symmetry themselves.
  static HermitianMatrix from_constructed(ComplexMatrix m) {
    return HermitianMatrix(std::move(m));
  }

  Index size() const { return m_.rows(); }
  const ComplexMatrix& matrix() const { return m_; }
  Complex operator()(Index i, Index j) const { return m_(i, j); }
  double trace_real() const { return m_.trace().real(); }

 private:
  explicit HermitianMatrix(ComplexMatrix m) : m_(std::move(m)) {}
  ComplexMatrix m_;
};

// One ensemble: dimension, standardized entry law, variance profile, label.
struct EnsembleSpec {
  Index n;
  EntryDistribution entries;
  VarianceProfile profile;
  std::string label;

  EnsembleSpec(Index n_, EntryDistribution entries_, VarianceProfile profile_,
               std::string label_)
      : n(n_),
        entries(std::move(entries_)),
        profile(std::move(profile_)),
        label(std::move(label_)) {
    if (n < 1) throw ValidationError("ensemble spec: N >= 1 required");
    if (profile.size() != n)
      throw ValidationError("ensemble spec: profile dimension != N");
  }
};

inline EnsembleSpec gue_spec(Index n, std::string label = "gue") {
  return EnsembleSpec(n, EntryDistribution::complex_gaussian(), flat_profile(n),
                      std::move(label));
}

// Draw one Hermitian matrix: h_ij = sigma_ij v_ij for i < j with v from the
// entry law (components of variance 1/2 each, E|v|^2 = 1), h_ii real with
// variance sigma_ii^2. Entries are consumed row by row, diagonal first, so a
// given (spec, seed) always produces the identical matrix.
inline HermitianMatrix sample_matrix(const EnsembleSpec& spec, SeedSpec seed) {
  CounterRng rng(seed);
  const Index n = spec.n;
  ComplexMatrix h(n, n);
  for (Index i = 0; i < n; ++i) {
    h(i, i) = Complex(std::sqrt(spec.profile(i, i)) *
                          spec.entries.sample_diagonal(rng),
                      0.0);
    for (Index j = i + 1; j < n; ++j) {
      const Complex v = spec.entries.sample(rng);
      h(i, j) = std::sqrt(spec.profile(i, j)) * v;
      h(j, i) = std::conj(h(i, j));
    }
  }
  return HermitianMatrix::from_constructed(std::move(h));
}

// H(a) = sqrt(1-a^2) H0 + a V with V an independent GUE draw of the same
// dimension. The endpoints return the inputs bit-exactly.
inline HermitianMatrix gaussian_divisible(const HermitianMatrix& base, double a,
                                          SeedSpec seed) {
  if (!(a >= 0.0 && a <= 1.0))
    throw ValidationError("gaussian_divisible: a must lie in [0, 1]");
  if (a == 0.0) return base;
  const HermitianMatrix v = sample_matrix(gue_spec(base.size()), seed);
  if (a == 1.0) return v;
  // Real-scalar scaling and addition commute exactly with conjugation, so the
  // combination inherits bit-exact Hermitian symmetry and real diagonal.
  ComplexMatrix mixed =
      std::sqrt(1.0 - a * a) * base.matrix() + a * v.matrix();
  return HermitianMatrix::from_constructed(std::move(mixed));
}

// The Gaussian-divisible interpolation scale a = N^{-1/2+eps}.
inline double interpolation_time(Index n, double eps) {
  if (n < 1) throw ValidationError("interpolation_time: N >= 1 required");
  if (!(eps > 0.0 && eps <= 0.5))
    throw ValidationError(
        "interpolation_time: eps must lie in (0, 1/2] so that a is in (0, 1]");
  return std::pow(static_cast<double>(n), eps - 0.5);
}

}  // namespace rmt
