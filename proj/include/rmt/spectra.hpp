#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <utility>

#include <Eigen/Dense>

#include "rmt/ensemble.hpp"
#include "rmt/types.hpp"

namespace rmt {

// Sorted eigenvalues of one sampled matrix.
struct Spectrum {
  RealVector values;      // ascending
  double residual_bound;  // backward-error bound certified by the solver

  Index size() const { return values.size(); }

  // Synthetic spectra for diagnostics and tests.
  static Spectrum from_values(RealVector sorted) {
    for (Index i = 0; i + 1 < sorted.size(); ++i)
      if (sorted[i] > sorted[i + 1])
        throw ValidationError("spectrum values must be nondecreasing");
    return Spectrum{std::move(sorted), 0.0};
  }
};

// Dense Hermitian eigensolve (Householder tridiagonalization + implicit QL),
// eigenvalues only. The recorded residual bound is the standard backward-error
// model eps * N * ||H||; the trace identity is checked against tol * N * ||H||
// as a cheap consistency gate.
inline Spectrum eigenvalues(const HermitianMatrix& h, double tol = 1e-10) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h.matrix(),
                                                      Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "eigensolver did not converge for N = " << h.size()
       << " (Eigen ComputationInfo " << static_cast<int>(solver.info())
       << " after 30 implicit QL sweeps per eigenvalue)";
    throw NumericalError(os.str());
  }
  RealVector vals = solver.eigenvalues();  // ascending by Eigen's contract
  const double n = static_cast<double>(h.size());
  const double norm = std::max(std::abs(vals[0]), std::abs(vals[vals.size() - 1]));
  const double trace_dev = std::abs(vals.sum() - h.trace_real());
  if (trace_dev > tol * n * std::max(norm, 1e-300)) {
    std::ostringstream os;
    os << "eigensolver trace check failed: |sum(lambda) - tr H| = " << trace_dev
       << " exceeds " << tol << " * N * ||H||";
    throw NumericalError(os.str());
  }
  const double eps = std::numeric_limits<double>::epsilon();
  return Spectrum{std::move(vals), eps * n * norm};
}

// Semicircle density rho(E) = sqrt(4 - E^2) / (2 pi) on [-2, 2].
inline double semicircle_density(double e) {
  const double d = 4.0 - e * e;
  if (d <= 0.0) return 0.0;
  return std::sqrt(d) / (2.0 * std::numbers::pi);
}

// Antiderivative of the density: x sqrt(4-x^2)/(4 pi) + asin(x/2)/pi, with the
// argument clamped to the support.
inline double semicircle_cdf(double e) {
  const double x = std::clamp(e, -2.0, 2.0);
  return 0.5 + x * std::sqrt(4.0 - x * x) / (4.0 * std::numbers::pi) +
         std::asin(0.5 * x) / std::numbers::pi;
}

// Semicircle mass of [e1, e2].
inline double semicircle_count(double e1, double e2) {
  if (e1 > e2) throw ValidationError("semicircle_count: need E1 <= E2");
  return semicircle_cdf(e2) - semicircle_cdf(e1);
}

// Eigenvalues moved to the local scale alpha = N rho(E) (lambda - E), where
// unit spacing is the mean level spacing at the bulk energy E.
struct LocalCoordinates {
  double energy;
  double density;
  RealVector alphas;  // same order as the spectrum, hence ascending
};

inline LocalCoordinates rescale_around_energy(const Spectrum& spectrum,
                                              double energy) {
  if (!(std::abs(energy) < 2.0))
    throw ValidationError("rescale_around_energy: |E| < 2 required (bulk only)");
  const double rho = semicircle_density(energy);
  const double scale = static_cast<double>(spectrum.size()) * rho;
  LocalCoordinates out{energy, rho, RealVector(spectrum.size())};
  out.alphas = scale * (spectrum.values.array() - energy);
  return out;
}

// Window count against the semicircle reference (step-1 diagnostic).
struct LocalDensityReport {
  Index empirical;
  double predicted;
  double relative_deviation;
};

inline LocalDensityReport local_density_check(const Spectrum& spectrum,
                                              double energy, double eta) {
  if (!(std::abs(energy) < 2.0))
    throw ValidationError("local_density_check: |E| < 2 required");
  if (!(eta > 0.0)) throw ValidationError("local_density_check: eta > 0 required");
  const double* begin = spectrum.values.data();
  const double* end = begin + spectrum.size();
  const double* lo = std::lower_bound(begin, end, energy - eta);
  const double* hi = std::upper_bound(begin, end, energy + eta);
  const Index count = hi - lo;
  const double predicted = static_cast<double>(spectrum.size()) *
                           semicircle_count(energy - eta, energy + eta);
  double rel;
  if (predicted > 0.0)
    rel = (static_cast<double>(count) - predicted) / predicted;
  else
    rel = count == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  return LocalDensityReport{count, predicted, rel};
}

// Kolmogorov-Smirnov distance between the empirical spectral CDF and the
// semicircle CDF.
inline double ks_distance_to_semicircle(const Spectrum& spectrum) {
  const Index n = spectrum.size();
  if (n == 0) throw ValidationError("ks distance: empty spectrum");
  const double dn = static_cast<double>(n);
  double d = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double f = semicircle_cdf(spectrum.values[i]);
    d = std::max(d, std::abs(static_cast<double>(i + 1) / dn - f));
    d = std::max(d, std::abs(f - static_cast<double>(i) / dn));
  }
  return d;
}

}  // namespace rmt
