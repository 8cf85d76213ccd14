#pragma once

#include <array>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "rmt/moments.hpp"
#include "rmt/types.hpp"

namespace rmt {

// One row of the four-moment comparison: |E v^(a,b) - E w^(a,b)| against the
// bound N^(-delta - 2 + (a+b)/2).
struct PairCheck {
  int a;
  int b;
  double moment_v;
  double moment_w;
  double difference;
  double bound;
  bool pass;
};

struct MatchReport {
  Index n;
  double delta;  // matching exponent (not the variance-profile bound)
  std::array<PairCheck, ComponentMoments::kPairCount> pairs;
  bool overall_pass;

  double max_difference() const {
    double m = 0.0;
    for (const auto& p : pairs) m = std::max(m, p.difference);
    return m;
  }
};

inline MatchReport check_four_moment_condition(const ComponentMoments& mv,
                                               const ComponentMoments& mw,
                                               Index n, double delta) {
  if (n < 1) throw ValidationError("four-moment check: N >= 1 required");
  if (!(delta > 0.0))
    throw ValidationError("four-moment check: delta > 0 required");
  MatchReport report{n, delta, {}, true};
  const double dn = static_cast<double>(n);
  for (int i = 0; i < ComponentMoments::kPairCount; ++i) {
    const auto [a, b] = ComponentMoments::pairs()[i];
    const double v = mv.at(a, b).value;
    const double w = mw.at(a, b).value;
    const double diff = std::abs(v - w);
    const double bound = std::pow(dn, -delta - 2.0 + 0.5 * (a + b));
    const bool pass = diff <= bound;
    report.pairs[i] = PairCheck{a, b, v, w, diff, bound, pass};
    report.overall_pass = report.overall_pass && pass;
  }
  return report;
}

namespace detail {

// Three-atom marginal {x1, 0, x3} with probabilities {p1, 1-p1-p3, p3}
// matching prescribed raw moments m1..m4. Symmetric targets get the exact
// closed form; otherwise a damped Newton iteration on the moment residual
// with a Levenberg fallback when the Jacobian degenerates.
struct MarginalFit {
  RealVector atoms;
  RealVector probs;
  double residual;
};

inline MarginalFit fit_marginal(const std::array<double, 4>& m, double tol) {
  const double m1 = m[0], m2 = m[1], m3 = m[2], m4 = m[3];
  if (!(m2 >= 0.0))
    throw ValidationError("atomic fit: infeasible target, m2 < 0");
  if (m2 == 0.0) {
    if (m1 != 0.0 || m3 != 0.0 || m4 != 0.0)
      throw ValidationError("atomic fit: infeasible target, m2 = 0 with higher moments");
    RealVector a(1), p(1);
    a << 0.0;
    p << 1.0;
    return MarginalFit{a, p, 0.0};
  }
  if (m4 < m2 * m2 - 1e-12) {
    std::ostringstream os;
    os << "atomic fit: infeasible target, m4 = " << m4 << " < m2^2 = "
       << m2 * m2;
    throw ValidationError(os.str());
  }

  if (std::abs(m1) <= 1e-12 && std::abs(m3) <= 1e-12) {
    // Exact symmetric solution: 2 p x^2 = m2, 2 p x^4 = m4.
    const double x = std::sqrt(m4 / m2);
    const double p = m2 * m2 / (2.0 * m4);
    RealVector atoms(3), probs(3);
    atoms << -x, 0.0, x;
    probs << p, 1.0 - 2.0 * p, p;
    double residual = 0.0;
    for (int k = 1; k <= 4; ++k) {
      double mk = 0.0;
      for (int i = 0; i < 3; ++i) mk += probs[i] * std::pow(atoms[i], k);
      residual = std::max(residual, std::abs(mk - m[k - 1]));
    }
    return MarginalFit{atoms, probs, residual};
  }

  // Asymmetric: Newton on theta = (x1, x3, p1, p3).
  Eigen::Vector4d theta(m1 - std::sqrt(m2), m1 + std::sqrt(m2), 0.25, 0.25);
  auto residual_of = [&](const Eigen::Vector4d& t) {
    Eigen::Vector4d f;
    for (int k = 1; k <= 4; ++k)
      f[k - 1] = t[2] * std::pow(t[0], k) + t[3] * std::pow(t[1], k) - m[k - 1];
    return f;
  };
  Eigen::Vector4d f = residual_of(theta);
  double best = f.lpNorm<Eigen::Infinity>();
  double lambda = 0.0;
  const double target = std::min(tol, 1e-12);
  for (int iter = 0; iter < 200 && best > target; ++iter) {
    Eigen::Matrix4d jac;
    for (int k = 1; k <= 4; ++k) {
      jac(k - 1, 0) = k * theta[2] * std::pow(theta[0], k - 1);
      jac(k - 1, 1) = k * theta[3] * std::pow(theta[1], k - 1);
      jac(k - 1, 2) = std::pow(theta[0], k);
      jac(k - 1, 3) = std::pow(theta[1], k);
    }
    Eigen::Vector4d step;
    if (lambda == 0.0) {
      step = jac.partialPivLu().solve(-f);
      if (!step.allFinite()) lambda = 1e-8;
    }
    if (lambda > 0.0) {  // least-squares fallback
      const Eigen::Matrix4d normal =
          jac.transpose() * jac + lambda * Eigen::Matrix4d::Identity();
      step = normal.ldlt().solve(-jac.transpose() * f);
    }
    double scale = 1.0;
    bool improved = false;
    for (int half = 0; half < 40; ++half, scale *= 0.5) {
      const Eigen::Vector4d trial = theta + scale * step;
      const Eigen::Vector4d ft = residual_of(trial);
      if (ft.lpNorm<Eigen::Infinity>() < best) {
        theta = trial;
        f = ft;
        best = ft.lpNorm<Eigen::Infinity>();
        improved = true;
        break;
      }
    }
    if (improved) {
      lambda = 0.0;
    } else if (lambda == 0.0) {
      lambda = 1e-8;
    } else if (lambda < 1e2) {
      lambda *= 100.0;
    } else {
      break;  // stalled
    }
  }
  if (best > tol) {
    std::ostringstream os;
    os << "atomic fit: Newton iteration did not reach residual " << tol
       << " (best " << best << ")";
    throw NumericalError(os.str());
  }
  const double p2 = 1.0 - theta[2] - theta[3];
  for (double p : {theta[2], theta[3], p2})
    if (p < -1e-10)
      throw ValidationError(
          "atomic fit: infeasible target, negative probability at the optimum");
  RealVector atoms(3), probs(3);
  atoms << theta[0], 0.0, theta[1];
  probs << std::max(theta[2], 0.0), std::max(p2, 0.0), std::max(theta[3], 0.0);
  probs /= probs.sum();
  return MarginalFit{atoms, probs, best};
}

}  // namespace detail

// Constructs an atomic entry law whose component marginals match the target's
// moments of orders 1..4 within tol. Three atoms per component are the
// minimal sufficient support; larger requested supports still yield the
// three-atom solution.
inline EntryDistribution fit_atomic_match(const ComponentMoments& target,
                                          int support_size, double tol = 1e-10) {
  if (support_size < 3)
    throw ValidationError("fit_atomic_match: support_size >= 3 required");
  if (!(tol > 0.0)) throw ValidationError("fit_atomic_match: tol > 0 required");

  // The construction needs independent components: mixed moments must factor.
  for (const auto& [a, b] : ComponentMoments::pairs()) {
    if (a == 0 || b == 0) continue;
    const auto& mixed = target.at(a, b);
    const double factored = target.at(a, 0).value * target.at(0, b).value;
    const double slack =
        1e-8 + 10.0 * (mixed.standard_error + target.at(a, 0).standard_error +
                       target.at(0, b).standard_error);
    if (std::abs(mixed.value - factored) > slack)
      throw ValidationError(
          "fit_atomic_match: target mixed moments do not factor; "
          "independent components required");
  }

  const std::array<double, 4> mre = {
      target.at(1, 0).value, target.at(2, 0).value, target.at(3, 0).value,
      target.at(4, 0).value};
  const std::array<double, 4> mim = {
      target.at(0, 1).value, target.at(0, 2).value, target.at(0, 3).value,
      target.at(0, 4).value};
  const detail::MarginalFit re = detail::fit_marginal(mre, tol);
  const detail::MarginalFit im = detail::fit_marginal(mim, tol);
  return EntryDistribution::atomic(AtomicComponent(re.atoms, re.probs),
                                   AtomicComponent(im.atoms, im.probs));
}

}  // namespace rmt
