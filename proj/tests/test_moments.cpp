#include "doctest.h"

#include <array>
#include <cmath>

#include "rmt/accumulator.hpp"
#include "rmt/moment_match.hpp"
#include "rmt/moments.hpp"

using namespace rmt;

namespace {

ComponentMoments moments_from_table(
    const std::array<double, ComponentMoments::kPairCount>& values) {
  std::array<MomentValue, ComponentMoments::kPairCount> table{};
  for (int i = 0; i < ComponentMoments::kPairCount; ++i)
    table[i] = MomentValue{values[i], 0.0, true};
  return ComponentMoments(table);
}

}  // namespace

TEST_CASE("gaussian moments: the closed forms") {
  const ComponentMoments m =
      compute_moments(EntryDistribution::complex_gaussian());
  CHECK(m.at(2, 0).value == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(m.at(0, 2).value == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(m.at(4, 0).value == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(m.at(0, 4).value == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(m.at(2, 2).value == doctest::Approx(0.25).epsilon(1e-14));
  for (const auto& [a, b] : ComponentMoments::pairs())
    if (a % 2 == 1 || b % 2 == 1) CHECK(m.at(a, b).value == 0.0);
  CHECK(m.all_analytic());
}

TEST_CASE("four-point moments from the four atoms") {
  const ComponentMoments m =
      compute_moments(EntryDistribution::four_point_bernoulli());
  CHECK(m.at(2, 0).value == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(m.at(4, 0).value == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(m.at(2, 2).value == doctest::Approx(0.25).epsilon(1e-14));
  for (const auto& [a, b] : ComponentMoments::pairs())
    if (a % 2 == 1 || b % 2 == 1) CHECK(m.at(a, b).value == 0.0);
}

TEST_CASE("pair table is the complete set with 1 <= a+b <= 4") {
  CHECK(ComponentMoments::pairs().size() == 14);
  for (const auto& [a, b] : ComponentMoments::pairs()) {
    CHECK(a + b >= 1);
    CHECK(a + b <= 4);
  }
  const ComponentMoments m =
      compute_moments(EntryDistribution::complex_gaussian());
  CHECK_THROWS_AS(m.at(5, 0), ValidationError);
  CHECK_THROWS_AS(m.at(0, 0), ValidationError);
}

TEST_CASE("factorization: analytic mixed moments match direct 2-D monte carlo") {
  const EntryDistribution law = EntryDistribution::four_point_bernoulli();
  const ComponentMoments analytic = compute_moments(law);
  CounterRng rng({505, 0});
  std::array<Accumulator, ComponentMoments::kPairCount> acc;
  for (int s = 0; s < 200000; ++s) {
    const Complex v = law.sample(rng);
    for (int i = 0; i < ComponentMoments::kPairCount; ++i) {
      const auto [a, b] = ComponentMoments::pairs()[i];
      acc[i].push(std::pow(v.real(), a) * std::pow(v.imag(), b));
    }
  }
  for (int i = 0; i < ComponentMoments::kPairCount; ++i) {
    const auto [a, b] = ComponentMoments::pairs()[i];
    const double se = std::max(acc[i].standard_error(), 1e-12);
    CHECK(std::abs(acc[i].mean() - analytic.at(a, b).value) <= 4.0 * se);
  }
}

TEST_CASE("heavy-tailed moments are monte carlo with standard errors") {
  const EntryDistribution law = EntryDistribution::heavy_tailed(6.0);
  CHECK_THROWS_AS(compute_moments(law, 0), ValidationError);
  const ComponentMoments m = compute_moments(law, 200000);
  CHECK_FALSE(m.all_analytic());
  CHECK(m.at(2, 0).standard_error > 0.0);
  // Components have variance 1/2 by standardization.
  CHECK(std::abs(m.at(2, 0).value - 0.5) <= 4.0 * m.at(2, 0).standard_error);
  CHECK(std::abs(m.at(1, 1).value) <= 4.0 * m.at(1, 1).standard_error);
}

TEST_CASE("identical laws pass the four-moment condition for every N, delta") {
  const ComponentMoments m =
      compute_moments(EntryDistribution::complex_gaussian());
  for (Index n : {10L, 1000L, 100000000L})
    for (double delta : {0.01, 0.5, 2.0}) {
      const MatchReport r = check_four_moment_condition(m, m, n, delta);
      CHECK(r.overall_pass);
      CHECK(r.max_difference() == 0.0);
    }
}

TEST_CASE("gaussian vs four-point: pass at N=100, fail at N=10^6 (delta 0.1)") {
  const ComponentMoments mv =
      compute_moments(EntryDistribution::complex_gaussian());
  const ComponentMoments mw =
      compute_moments(EntryDistribution::four_point_bernoulli());
  const MatchReport at100 = check_four_moment_condition(mv, mw, 100, 0.1);
  CHECK(at100.overall_pass);
  const MatchReport at1e6 = check_four_moment_condition(mv, mw, 1000000, 0.1);
  CHECK_FALSE(at1e6.overall_pass);
  for (const PairCheck& p : at1e6.pairs) {
    if (p.a == 4 && p.b == 0) {
      CHECK(p.difference == doctest::Approx(0.5).epsilon(1e-14));
      CHECK(p.bound == doctest::Approx(0.251188643150958).epsilon(1e-12));
      CHECK_FALSE(p.pass);
    }
    if (p.a == 2 && p.b == 0) CHECK(p.pass);  // variances agree exactly
  }
  for (const PairCheck& p : at100.pairs)
    if (p.a == 4 && p.b == 0)
      CHECK(p.bound == doctest::Approx(0.6309573444801932).epsilon(1e-12));
}

TEST_CASE("the checker is symmetric in its two arguments") {
  const ComponentMoments mv =
      compute_moments(EntryDistribution::complex_gaussian());
  const ComponentMoments mw =
      compute_moments(EntryDistribution::four_point_bernoulli());
  const MatchReport ab = check_four_moment_condition(mv, mw, 5000, 0.2);
  const MatchReport ba = check_four_moment_condition(mw, mv, 5000, 0.2);
  CHECK(ab.overall_pass == ba.overall_pass);
  for (int i = 0; i < ComponentMoments::kPairCount; ++i) {
    CHECK(ab.pairs[i].difference == ba.pairs[i].difference);
    CHECK(ab.pairs[i].pass == ba.pairs[i].pass);
  }
}

TEST_CASE("pass region is monotone: shrinking N keeps nonzero passes passing") {
  const ComponentMoments mv =
      compute_moments(EntryDistribution::complex_gaussian());
  const ComponentMoments mw =
      compute_moments(EntryDistribution::four_point_bernoulli());
  for (double delta : {0.05, 0.1, 0.3}) {
    bool passed_before = false;
    for (Index n : {4000000L, 40000L, 400L, 4L}) {  // descending N
      const bool pass = check_four_moment_condition(mv, mw, n, delta).overall_pass;
      if (passed_before) CHECK(pass);
      passed_before = passed_before || pass;
    }
  }
}

TEST_CASE("marginal fit reproduces the exact gaussian three-atom law") {
  const detail::MarginalFit fit = detail::fit_marginal({0.0, 1.0, 0.0, 3.0}, 1e-10);
  REQUIRE(fit.atoms.size() == 3);
  CHECK(fit.atoms[0] == doctest::Approx(-std::sqrt(3.0)).epsilon(1e-14));
  CHECK(fit.atoms[1] == 0.0);
  CHECK(fit.atoms[2] == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
  CHECK(fit.probs[0] == doctest::Approx(1.0 / 6).epsilon(1e-14));
  CHECK(fit.probs[1] == doctest::Approx(2.0 / 3).epsilon(1e-14));
  CHECK(fit.probs[2] == doctest::Approx(1.0 / 6).epsilon(1e-14));
  // Verify sum p x^2 = 1 and sum p x^4 = 3 analytically.
  double m2 = 0.0, m4 = 0.0;
  for (int i = 0; i < 3; ++i) {
    m2 += fit.probs[i] * fit.atoms[i] * fit.atoms[i];
    m4 += fit.probs[i] * std::pow(fit.atoms[i], 4);
  }
  CHECK(m2 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(m4 == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("symmetric targets produce exactly zero odd fitted moments") {
  const detail::MarginalFit fit = detail::fit_marginal({0.0, 0.5, 0.0, 0.75}, 1e-10);
  double m1 = 0.0, m3 = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double x = fit.atoms[i];
    m1 += fit.probs[i] * x;
    m3 += fit.probs[i] * x * x * x;
  }
  CHECK(m1 == 0.0);
  CHECK(m3 == 0.0);
}

TEST_CASE("infeasible targets are rejected: m4 < m2^2") {
  CHECK_THROWS_WITH_AS(detail::fit_marginal({0.0, 1.0, 0.0, 0.5}, 1e-10),
                       doctest::Contains("infeasible"), ValidationError);
}

TEST_CASE("asymmetric marginal fit converges to the moment targets") {
  // Moments of atoms {-1, 0, 2} with probs {0.2, 0.7, 0.1}.
  const std::array<double, 4> target = {0.0, 0.6, 0.6, 1.8};
  const detail::MarginalFit fit = detail::fit_marginal(target, 1e-10);
  for (int k = 1; k <= 4; ++k) {
    double mk = 0.0;
    for (Index i = 0; i < fit.atoms.size(); ++i)
      mk += fit.probs[i] * std::pow(fit.atoms[i], k);
    CHECK(mk == doctest::Approx(target[k - 1]).epsilon(1e-9));
  }
}

TEST_CASE("fit_atomic_match round-trips the gaussian moments") {
  const ComponentMoments target =
      compute_moments(EntryDistribution::complex_gaussian());
  const EntryDistribution matched = fit_atomic_match(target, 3, 1e-10);
  CHECK(matched.kind() == EntryKind::Atomic);
  const ComponentMoments fitted = compute_moments(matched);
  for (const auto& [a, b] : ComponentMoments::pairs())
    CHECK(std::abs(fitted.at(a, b).value - target.at(a, b).value) <= 1e-10);
  // And therefore passes the four-moment condition with tiny differences.
  const MatchReport r = check_four_moment_condition(target, fitted, 300, 0.5);
  CHECK(r.overall_pass);
  CHECK(r.max_difference() <= 1e-9);
}

TEST_CASE("fit_atomic_match validates its inputs") {
  std::array<double, ComponentMoments::kPairCount> bad{};
  // Degenerate-feasible components but a non-factoring (2,2) mixed moment.
  bad[ComponentMoments::pair_index(2, 0)] = 0.5;
  bad[ComponentMoments::pair_index(0, 2)] = 0.5;
  bad[ComponentMoments::pair_index(4, 0)] = 0.75;
  bad[ComponentMoments::pair_index(0, 4)] = 0.75;
  bad[ComponentMoments::pair_index(2, 2)] = 0.5;  // should be 0.25
  CHECK_THROWS_WITH_AS(fit_atomic_match(moments_from_table(bad), 3),
                       doctest::Contains("factor"), ValidationError);
  const ComponentMoments target =
      compute_moments(EntryDistribution::complex_gaussian());
  CHECK_THROWS_AS(fit_atomic_match(target, 2), ValidationError);
  CHECK_THROWS_AS(fit_atomic_match(target, 3, 0.0), ValidationError);
}

TEST_CASE("entry moments: closed forms and divergence") {
  CHECK(entry_moment(EntryDistribution::complex_gaussian(), 2.0).value ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(entry_moment(EntryDistribution::complex_gaussian(), 4.0).value ==
        doctest::Approx(2.0).epsilon(1e-13));  // Gamma(3) = 2
  CHECK(entry_moment(EntryDistribution::four_point_bernoulli(), 17.0).value ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_WITH_AS(entry_moment(EntryDistribution::heavy_tailed(4.5), 5.0),
                       doctest::Contains("diverges"), ValidationError);
  CHECK_THROWS_AS(entry_moment(EntryDistribution::complex_gaussian(), 0.5),
                  ValidationError);
  const MomentEstimate heavy =
      entry_moment(EntryDistribution::heavy_tailed(4.5), 2.0, 200000);
  CHECK_FALSE(heavy.analytic);
  CHECK(std::abs(heavy.value - 1.0) <= 4.0 * heavy.standard_error);
}

TEST_CASE("atomic entry moment: finite double sum over atom pairs") {
  RealVector atoms(3), probs(3);
  atoms << -std::sqrt(1.5), 0.0, std::sqrt(1.5);
  probs << 1.0 / 6, 2.0 / 3, 1.0 / 6;
  const EntryDistribution d = EntryDistribution::atomic(
      AtomicComponent(atoms, probs), AtomicComponent(atoms, probs));
  // E|v|^2 = E X^2 + E Y^2 = 1 by standardization.
  CHECK(entry_moment(d, 2.0).value == doctest::Approx(1.0).epsilon(1e-13));
}
