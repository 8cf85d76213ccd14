#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "rmt/rng.hpp"
#include "rmt/types.hpp"

namespace rmt {

enum class EntryKind { ComplexGaussian, FourPointBernoulli, Atomic, HeavyTailed };

inline const char* to_string(EntryKind k) {
  switch (k) {
    case EntryKind::ComplexGaussian: return "complex-gaussian";
    case EntryKind::FourPointBernoulli: return "four-point-bernoulli";
    case EntryKind::Atomic: return "atomic";
    case EntryKind::HeavyTailed: return "heavy-tailed";
  }
  return "?";
}

// One real marginal of an atomic law: finite support with probabilities.
class AtomicComponent {
 public:
  AtomicComponent(RealVector atoms, RealVector probs)
      : atoms_(std::move(atoms)), probs_(std::move(probs)) {
    if (atoms_.size() == 0 || atoms_.size() != probs_.size())
      throw ValidationError("atomic component: atoms/probs size mismatch");
    if (probs_.minCoeff() < 0.0)
      throw ValidationError("atomic component: negative probability");
    if (std::abs(probs_.sum() - 1.0) > 1e-12)
      throw ValidationError("atomic component: probabilities do not sum to 1");
    cumulative_.resize(probs_.size());
    double acc = 0.0;
    for (Index i = 0; i < probs_.size(); ++i) cumulative_[i] = (acc += probs_[i]);
    cumulative_[probs_.size() - 1] = 1.0;
  }

  const RealVector& atoms() const { return atoms_; }
  const RealVector& probs() const { return probs_; }

  // E X^order, exact finite sum.
  double moment(int order) const {
    double m = 0.0;
    for (Index i = 0; i < atoms_.size(); ++i)
      m += probs_[i] * std::pow(atoms_[i], order);
    return m;
  }

  double sample(CounterRng& rng) const {
    const double u = rng.uniform01();
    Index i = 0;
    while (i + 1 < cumulative_.size() && u >= cumulative_[i]) ++i;
    return atoms_[i];
  }

 private:
  RealVector atoms_;
  RealVector probs_;
  RealVector cumulative_;
};

// A standardized complex entry law: mean zero in both components, E|v|^2 = 1,
// independent real and imaginary parts. The heavy-tailed family is a
// symmetrized Pareto per component (density ~ |x|^{-1-gamma} beyond the cutoff
// x_m, zero inside), with x_m chosen so each component has variance 1/2.
//
// The single point mass at zero is also accepted: it fails the unit-variance
// standardization by definition but gives deterministic matrices, which the
// statistics diagnostics rely on.
class EntryDistribution {
 public:
  static EntryDistribution complex_gaussian() {
    return EntryDistribution(EntryKind::ComplexGaussian);
  }

  // v uniform on {(+-1 +- i)/sqrt(2)}.
  static EntryDistribution four_point_bernoulli() {
    return EntryDistribution(EntryKind::FourPointBernoulli);
  }

  static EntryDistribution atomic(AtomicComponent re, AtomicComponent im) {
    EntryDistribution d(EntryKind::Atomic);
    if (std::abs(re.moment(1)) > 1e-12 || std::abs(im.moment(1)) > 1e-12)
      throw ValidationError("atomic entry law: component mean is not 0");
    const double second = re.moment(2) + im.moment(2);
    if (second != 0.0 && std::abs(second - 1.0) > 1e-12)
      throw ValidationError("atomic entry law: E|v|^2 != 1");
    d.re_ = std::move(re);
    d.im_ = std::move(im);
    return d;
  }

  static EntryDistribution degenerate_zero() {
    RealVector a(1), p(1);
    a << 0.0;
    p << 1.0;
    return atomic(AtomicComponent(a, p), AtomicComponent(a, p));
  }

  static EntryDistribution heavy_tailed(double gamma) {
    if (!(gamma > 4.0))
      throw ValidationError("heavy-tailed entry law requires tail index > 4");
    EntryDistribution d(EntryKind::HeavyTailed);
    d.gamma_ = gamma;
    d.pareto_cutoff_ = std::sqrt((gamma - 2.0) / (2.0 * gamma));
    return d;
  }

  EntryKind kind() const { return kind_; }
  const char* kind_name() const { return to_string(kind_); }

  double tail_index() const {
    if (kind_ != EntryKind::HeavyTailed)
      throw ValidationError("tail_index: not a heavy-tailed law");
    return gamma_;
  }
  double pareto_cutoff() const { return pareto_cutoff_; }

  const AtomicComponent& real_component() const { return component(0); }
  const AtomicComponent& imag_component() const { return component(1); }

  bool is_degenerate() const {
    return kind_ == EntryKind::Atomic && re_->moment(2) == 0.0 &&
           im_->moment(2) == 0.0;
  }

  // Closed-form marginal moments exist for every kind except heavy-tailed
  // (whose |v|-moments mix the two components).
  bool has_analytic_moments() const { return kind_ != EntryKind::HeavyTailed; }

  // E[(component)^order] for component 0 = Re, 1 = Im. Analytic kinds only.
  double component_moment(int comp, int order) const {
    switch (kind_) {
      case EntryKind::ComplexGaussian:
        // N(0, 1/2): E X^{2m} = (2m-1)!! / 2^m.
        if (order % 2 == 1) return 0.0;
        switch (order) {
          case 0: return 1.0;
          case 2: return 0.5;
          case 4: return 0.75;
          default: {
            double m = 1.0;
            for (int j = 1; j < order; j += 2) m *= j;
            return m / std::pow(2.0, order / 2);
          }
        }
      case EntryKind::FourPointBernoulli:
        // +-1/sqrt(2) with equal weight.
        if (order % 2 == 1) return 0.0;
        return std::pow(0.5, order / 2);
      case EntryKind::Atomic:
        return component(comp).moment(order);
      case EntryKind::HeavyTailed:
        throw ValidationError("component_moment: heavy-tailed has no closed form here");
    }
    return 0.0;
  }

  // One draw of the standardized complex variable. Consumes the stream in a
  // fixed order (real part first), so samples are pure in (law, stream).
  Complex sample(CounterRng& rng) const {
    switch (kind_) {
      case EntryKind::ComplexGaussian: {
        double g0, g1;
        rng.normal_pair(g0, g1);
        return Complex(g0, g1) * std::numbers::sqrt2 / 2.0;
      }
      case EntryKind::FourPointBernoulli: {
        const std::uint64_t bits = rng.next_u64();
        const double re = (bits & 1) ? 0.5 * std::numbers::sqrt2 : -0.5 * std::numbers::sqrt2;
        const double im = (bits & 2) ? 0.5 * std::numbers::sqrt2 : -0.5 * std::numbers::sqrt2;
        return Complex(re, im);
      }
      case EntryKind::Atomic: {
        const double re = re_->sample(rng);
        const double im = im_->sample(rng);
        return Complex(re, im);
      }
      case EntryKind::HeavyTailed:
        return Complex(sample_pareto(rng), sample_pareto(rng));
    }
    return Complex(0, 0);
  }

  // The real-part law rescaled to unit variance; used for diagonal entries.
  double sample_diagonal(CounterRng& rng) const {
    switch (kind_) {
      case EntryKind::ComplexGaussian:
        return rng.normal();
      case EntryKind::FourPointBernoulli:
        return (rng.next_u64() & 1) ? 1.0 : -1.0;
      case EntryKind::Atomic: {
        const double var = re_->moment(2);
        if (var == 0.0) return re_->sample(rng);  // degenerate point mass
        return re_->sample(rng) / std::sqrt(var);
      }
      case EntryKind::HeavyTailed:
        return sample_pareto(rng) * std::numbers::sqrt2;
    }
    return 0.0;
  }

 private:
  explicit EntryDistribution(EntryKind kind) : kind_(kind) {}

  const AtomicComponent& component(int comp) const {
    if (kind_ != EntryKind::Atomic)
      throw ValidationError("component access: not an atomic law");
    return comp == 0 ? *re_ : *im_;
  }

  // Symmetrized Pareto, component variance 1/2: |X| = x_m U^{-1/gamma}.
  double sample_pareto(CounterRng& rng) const {
    const double sign = (rng.next_u64() & 1) ? 1.0 : -1.0;
    const double u = rng.uniform01_open_below();
    return sign * pareto_cutoff_ * std::pow(u, -1.0 / gamma_);
  }

  EntryKind kind_;
  double gamma_ = 0.0;
  double pareto_cutoff_ = 0.0;
  std::optional<AtomicComponent> re_;
  std::optional<AtomicComponent> im_;
};

}  // namespace rmt
