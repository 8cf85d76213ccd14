#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <sstream>
#include <utility>

#include "rmt/accumulator.hpp"
#include "rmt/entry_distribution.hpp"
#include "rmt/rng.hpp"
#include "rmt/types.hpp"

namespace rmt {

struct MomentValue {
  double value = 0.0;
  double standard_error = 0.0;  // zero when analytic
  bool analytic = true;
};

// All mixed moments E[(Re v)^a (Im v)^b] with 1 <= a+b <= 4: fourteen pairs,
// ordered by total degree and then by descending a.
class ComponentMoments {
 public:
  static constexpr int kPairCount = 14;

  static const std::array<std::pair<int, int>, kPairCount>& pairs() {
    static const std::array<std::pair<int, int>, kPairCount> table = {{
        {1, 0}, {0, 1},
        {2, 0}, {1, 1}, {0, 2},
        {3, 0}, {2, 1}, {1, 2}, {0, 3},
        {4, 0}, {3, 1}, {2, 2}, {1, 3}, {0, 4},
    }};
    return table;
  }

  static int pair_index(int a, int b) {
    const auto& table = pairs();
    for (int i = 0; i < kPairCount; ++i)
      if (table[i].first == a && table[i].second == b) return i;
    std::ostringstream os;
    os << "component moments: (" << a << "," << b
       << ") is not a pair with 1 <= a+b <= 4";
    throw ValidationError(os.str());
  }

  explicit ComponentMoments(std::array<MomentValue, kPairCount> values)
      : values_(values) {
    if (all_analytic()) {
      const double second = at(2, 0).value + at(0, 2).value;
      if (second != 0.0 && std::abs(second - 1.0) > 1e-10)
        throw ValidationError(
            "component moments: analytic E(Re v)^2 + E(Im v)^2 != 1");
    }
  }

  const MomentValue& at(int a, int b) const { return values_[pair_index(a, b)]; }

  bool all_analytic() const {
    for (const auto& v : values_)
      if (!v.analytic) return false;
    return true;
  }

 private:
  std::array<MomentValue, kPairCount> values_;
};

inline constexpr long kDefaultMomentSamples = 400000;

// Mixed moments of the standardized entry law. Closed forms for the gaussian,
// four-point and atomic kinds (independent components factor the pairs into
// marginal products); Monte Carlo with standard errors for heavy tails.
inline ComponentMoments compute_moments(const EntryDistribution& dist,
                                        std::optional<long> mc_samples = {},
                                        SeedSpec seed = {0x6D6F6D656E74ULL, 0}) {
  std::array<MomentValue, ComponentMoments::kPairCount> values{};
  if (dist.has_analytic_moments()) {
    for (int i = 0; i < ComponentMoments::kPairCount; ++i) {
      const auto [a, b] = ComponentMoments::pairs()[i];
      values[i] = MomentValue{dist.component_moment(0, a) *
                                  dist.component_moment(1, b),
                              0.0, true};
    }
    return ComponentMoments(values);
  }
  if (mc_samples.has_value() && *mc_samples <= 0)
    throw ValidationError("compute_moments: Monte Carlo needs mc_samples > 0");
  const long n = mc_samples.value_or(kDefaultMomentSamples);
  std::array<Accumulator, ComponentMoments::kPairCount> acc;
  CounterRng rng(seed);
  for (long s = 0; s < n; ++s) {
    const Complex v = dist.sample(rng);
    double re_pow[5] = {1, 0, 0, 0, 0};
    double im_pow[5] = {1, 0, 0, 0, 0};
    for (int p = 1; p <= 4; ++p) {
      re_pow[p] = re_pow[p - 1] * v.real();
      im_pow[p] = im_pow[p - 1] * v.imag();
    }
    for (int i = 0; i < ComponentMoments::kPairCount; ++i) {
      const auto [a, b] = ComponentMoments::pairs()[i];
      acc[i].push(re_pow[a] * im_pow[b]);
    }
  }
  for (int i = 0; i < ComponentMoments::kPairCount; ++i)
    values[i] = MomentValue{acc[i].mean(), acc[i].standard_error(), false};
  return ComponentMoments(values);
}

struct MomentEstimate {
  double value;
  double standard_error;  // zero when analytic
  bool analytic;
};

// E|v|^p of the standardized complex entry. Analytic for the gaussian
// (Gamma(p/2 + 1)), four-point (|v| = 1) and atomic kinds; Monte Carlo for
// heavy tails, where p must stay below the tail index. Note the Monte Carlo
// standard error is itself heavy-tailed once 2p exceeds the tail index.
inline MomentEstimate entry_moment(const EntryDistribution& dist, double p,
                                   std::optional<long> mc_samples = {},
                                   SeedSpec seed = {0x6D6F6D656E74ULL, 1}) {
  if (!(p >= 1.0)) throw ValidationError("entry_moment: order p >= 1 required");
  switch (dist.kind()) {
    case EntryKind::ComplexGaussian:
      // |v|^2 is exponential with mean 1, so E|v|^p = Gamma(p/2 + 1).
      return {std::tgamma(0.5 * p + 1.0), 0.0, true};
    case EntryKind::FourPointBernoulli:
      return {1.0, 0.0, true};
    case EntryKind::Atomic: {
      const auto& re = dist.real_component();
      const auto& im = dist.imag_component();
      double m = 0.0;
      for (Index i = 0; i < re.atoms().size(); ++i)
        for (Index j = 0; j < im.atoms().size(); ++j) {
          const double r2 = re.atoms()[i] * re.atoms()[i] +
                            im.atoms()[j] * im.atoms()[j];
          m += re.probs()[i] * im.probs()[j] * std::pow(r2, 0.5 * p);
        }
      return {m, 0.0, true};
    }
    case EntryKind::HeavyTailed: {
      if (p >= dist.tail_index()) {
        std::ostringstream os;
        os << "entry_moment: E|v|^p diverges for p = " << p
           << " >= tail index gamma = " << dist.tail_index();
        throw ValidationError(os.str());
      }
      if (mc_samples.has_value() && *mc_samples <= 0)
        throw ValidationError("entry_moment: Monte Carlo needs mc_samples > 0");
      const long n = mc_samples.value_or(kDefaultMomentSamples);
      Accumulator acc;
      CounterRng rng(seed);
      for (long s = 0; s < n; ++s)
        acc.push(std::pow(std::abs(dist.sample(rng)), p));
      return {acc.mean(), acc.standard_error(), false};
    }
  }
  throw ValidationError("entry_moment: unknown entry kind");
}

}  // namespace rmt
