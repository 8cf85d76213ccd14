#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "rmt/accumulator.hpp"
#include "rmt/ensemble.hpp"
#include "rmt/observable.hpp"
#include "rmt/rng.hpp"
#include "rmt/spectra.hpp"
#include "rmt/types.hpp"

namespace rmt {

// The per-sample estimator of a k-point statistic: the sum of O over all
// ordered k-tuples of distinct eigenvalue indices whose rescaled coordinates
// land in the observable's support box. Candidates per axis come from binary
// search on the ascending alphas; everything outside contributes zero.
inline double per_sample_statistic(const LocalCoordinates& coords,
                                   const Observable& observable) {
  const int k = observable.arity();
  if (k < 1 || k > 3)
    throw ValidationError("per_sample_statistic: k in {1, 2, 3} supported");
  constexpr Index kMaxWindow = 10000;
  const double* begin = coords.alphas.data();
  const double* end = begin + coords.alphas.size();
  std::array<Index, 3> lo{}, hi{};
  for (int axis = 0; axis < k; ++axis) {
    lo[axis] = std::lower_bound(begin, end, observable.support_lo(axis)) - begin;
    hi[axis] = std::upper_bound(begin, end, observable.support_hi(axis)) - begin;
    if (hi[axis] - lo[axis] > kMaxWindow)
      throw ValidationError(
          "per_sample_statistic: more than 10^4 eigenvalues inside the support "
          "box; the observable is not local at this scale");
  }

  double sum = 0.0;
  double x[3];
  switch (k) {
    case 1:
      for (Index i = lo[0]; i < hi[0]; ++i) {
        x[0] = begin[i];
        sum += observable(x);
      }
      break;
    case 2:
      for (Index i = lo[0]; i < hi[0]; ++i)
        for (Index j = lo[1]; j < hi[1]; ++j) {
          if (j == i) continue;
          x[0] = begin[i];
          x[1] = begin[j];
          sum += observable(x);
        }
      break;
    case 3:
      for (Index i = lo[0]; i < hi[0]; ++i)
        for (Index j = lo[1]; j < hi[1]; ++j) {
          if (j == i) continue;
          for (Index l = lo[2]; l < hi[2]; ++l) {
            if (l == i || l == j) continue;
            x[0] = begin[i];
            x[1] = begin[j];
            x[2] = begin[l];
            sum += observable(x);
          }
        }
      break;
  }
  return sum;
}

struct EstimatorOptions {
  int workers = 1;
  // When set, each sample evaluates at an energy drawn uniformly from a
  // window of width N^(-1+eps) around E (contrast mode; off by default).
  std::optional<double> energy_average_eps;
};

// Monte Carlo reduction: samples are independent tasks keyed by index; each
// worker owns a contiguous index block and its own accumulator; blocks merge
// in ascending order, so the result depends only on (seeds, worker count).
template <class PerSample>
Accumulator run_samples(PerSample&& per_sample, long samples, int workers) {
  workers = std::max(1, workers);
  workers = static_cast<int>(
      std::min<long>(workers, std::max<long>(samples, 1)));
  if (workers == 1) {
    Accumulator acc;
    for (long i = 0; i < samples; ++i) acc.push(per_sample(i));
    return acc;
  }
  std::vector<Accumulator> partial(workers);
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    const long begin = samples * w / workers;
    const long end = samples * (w + 1) / workers;
    pool.emplace_back([&, w, begin, end] {
      try {
        for (long i = begin; i < end; ++i) partial[w].push(per_sample(i));
      } catch (...) {
        const std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  Accumulator acc;
  for (const auto& p : partial) acc.merge(p);
  return acc;
}

// Monte Carlo estimate of one fixed-energy k-point statistic.
struct CorrelationStatistic {
  std::string label;
  Index n;
  double energy;
  int k;
  long samples;
  double estimate;
  double standard_error;
};

namespace detail {

template <class MatrixFn>
CorrelationStatistic estimate_statistic(MatrixFn&& matrix_of, const std::string& label,
                                        Index n, double energy,
                                        const Observable& observable, long samples,
                                        SeedSpec seed, const EstimatorOptions& opts) {
  if (!(std::abs(energy) < 2.0))
    throw ValidationError("empirical statistic: |E| < 2 required (bulk only)");
  if (samples < 2)
    throw ValidationError("empirical statistic: M >= 2 samples required");
  const double window =
      opts.energy_average_eps
          ? std::pow(static_cast<double>(n), -1.0 + *opts.energy_average_eps)
          : 0.0;
  auto per_sample = [&](long i) -> double {
    try {
      const HermitianMatrix h = matrix_of(i);
      double e = energy;
      if (window > 0.0) {
        CounterRng jitter(substream(seed, i, 2));
        e = energy + (jitter.uniform01() - 0.5) * window;
      }
      const Spectrum spectrum = eigenvalues(h);
      return per_sample_statistic(rescale_around_energy(spectrum, e), observable);
    } catch (const NumericalError& err) {
      std::ostringstream os;
      os << "sample " << i << " of '" << label << "' (master seed "
         << seed.master << ", base stream " << seed.stream
         << ") failed: " << err.what();
      throw NumericalError(os.str());
    }
  };
  const Accumulator acc = run_samples(per_sample, samples, opts.workers);
  return CorrelationStatistic{label,         n,
                              energy,        observable.arity(),
                              acc.count(),   acc.mean(),
                              acc.standard_error()};
}

}  // namespace detail

inline CorrelationStatistic empirical_statistic(const EnsembleSpec& spec,
                                                double energy,
                                                const Observable& observable,
                                                long samples, SeedSpec seed,
                                                EstimatorOptions opts = {}) {
  return detail::estimate_statistic(
      [&](long i) { return sample_matrix(spec, substream(seed, i, 0)); },
      spec.label, spec.n, energy, observable, samples, seed, opts);
}

// Two-ensemble comparison at equal N. Both runs reuse the same seed layout
// (common random numbers), so identical specs with identical seeds give a
// difference of exactly zero and matched ensembles compare with reduced noise.
struct ComparisonResult {
  CorrelationStatistic a;
  CorrelationStatistic b;
  double difference;
  double combined_stderr;
  double z_score;
};

inline ComparisonResult compare_ensembles(const EnsembleSpec& spec_a,
                                          const EnsembleSpec& spec_b,
                                          double energy,
                                          const Observable& observable,
                                          long samples, SeedSpec seed,
                                          EstimatorOptions opts = {}) {
  if (spec_a.n != spec_b.n)
    throw ValidationError("compare_ensembles: the comparison requires equal N");
  const CorrelationStatistic a =
      empirical_statistic(spec_a, energy, observable, samples, seed, opts);
  const CorrelationStatistic b =
      empirical_statistic(spec_b, energy, observable, samples, seed, opts);
  const double diff = a.estimate - b.estimate;
  const double combined = std::hypot(a.standard_error, b.standard_error);
  double z = 0.0;
  if (combined > 0.0)
    z = diff / combined;
  else if (diff != 0.0)
    z = std::numeric_limits<double>::infinity();
  return ComparisonResult{a, b, diff, combined, z};
}

// One statistic per interpolation parameter a, each over fresh Gaussian-
// divisible matrices H(a) = sqrt(1-a^2) H0 + a V. Sample i of every sweep
// entry shares the same (H0, V) seeds, so the sweep is smooth in a.
inline std::vector<CorrelationStatistic> divisibility_sweep(
    const EnsembleSpec& base, const std::vector<double>& a_values, double energy,
    const Observable& observable, long samples, SeedSpec seed,
    EstimatorOptions opts = {}) {
  for (double a : a_values)
    if (!(a >= 0.0 && a <= 1.0))
      throw ValidationError("divisibility_sweep: every a must lie in [0, 1]");
  std::vector<CorrelationStatistic> out;
  out.reserve(a_values.size());
  for (double a : a_values) {
    std::ostringstream label;
    label << base.label << "_a" << a;
    auto matrix_of = [&](long i) {
      const HermitianMatrix h0 = sample_matrix(base, substream(seed, i, 0));
      return gaussian_divisible(h0, a, substream(seed, i, 1));
    };
    out.push_back(detail::estimate_statistic(matrix_of, label.str(), base.n,
                                             energy, observable, samples, seed,
                                             opts));
  }
  return out;
}

// An ensemble family parameterized by dimension: the entry law is fixed, the
// profile is rebuilt per N (band half-width either absolute or a fraction of
// N), labels get an _N suffix.
struct EnsembleFamily {
  EntryDistribution entries;
  ProfileKind profile_kind = ProfileKind::Flat;
  Index band_half_width = 0;    // absolute half-width, when positive
  double band_fraction = 0.0;   // half-width = max(1, round(fraction * N))
  double contrast = 0.0;
  std::string label;

  EnsembleSpec at(Index n) const {
    ProfileParams params;
    params.contrast = contrast;
    if (profile_kind == ProfileKind::CirculantBand) {
      params.half_width = band_half_width > 0
                              ? band_half_width
                              : std::max<Index>(1, static_cast<Index>(
                                        std::llround(band_fraction *
                                                     static_cast<double>(n))));
    }
    std::ostringstream label_n;
    label_n << label << "_N" << n;
    return EnsembleSpec(n, entries, make_variance_profile(profile_kind, n, params),
                        label_n.str());
  }
};

struct SweepRow {
  CorrelationStatistic statistic;
  double prediction;
  double deviation;  // estimate - prediction
};

// Fixed-energy statistic along ascending N against the fixed sine-kernel
// prediction (supplied by the caller so the quadrature runs once).
inline std::vector<SweepRow> convergence_sweep(
    const EnsembleFamily& family, const std::vector<Index>& n_values,
    double energy, const Observable& observable, double prediction, long samples,
    SeedSpec seed, EstimatorOptions opts = {}) {
  if (n_values.empty())
    throw ValidationError("convergence_sweep: N list must not be empty");
  for (std::size_t i = 1; i < n_values.size(); ++i)
    if (n_values[i] <= n_values[i - 1])
      throw ValidationError("convergence_sweep: N values must be ascending");
  std::vector<SweepRow> rows;
  rows.reserve(n_values.size());
  for (Index n : n_values) {
    const EnsembleSpec spec = family.at(n);
    CorrelationStatistic stat =
        empirical_statistic(spec, energy, observable, samples, seed, opts);
    const double deviation = stat.estimate - prediction;
    rows.push_back(SweepRow{std::move(stat), prediction, deviation});
  }
  return rows;
}

}  // namespace rmt
