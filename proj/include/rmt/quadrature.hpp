#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <queue>
#include <sstream>
#include <vector>

#include "rmt/types.hpp"

namespace rmt {

struct QuadratureResult {
  double value;
  double error_estimate;
  long evaluations;
  long cells;
};

// Budget exhausted before the error estimate reached the tolerance. Carries
// the best estimate and the error actually achieved.
class QuadratureError : public NumericalError {
 public:
  QuadratureError(const std::string& msg, double best_value,
                  double achieved_error)
      : NumericalError(msg),
        best_value(best_value),
        achieved_error(achieved_error) {}
  double best_value;
  double achieved_error;
};

namespace detail {

// Gauss-Kronrod 7-15 pair on [-1, 1] (QUADPACK dqk15 constants). The 7 Gauss
// nodes are a subset of the 15 Kronrod nodes, so one evaluation sweep yields
// both the value (K15) and the embedded lower-order result (G7).
struct GaussKronrod15 {
  std::array<double, 15> node;
  std::array<double, 15> kronrod;
  std::array<double, 15> gauss;  // zero at Kronrod-only nodes

  GaussKronrod15() {
    constexpr std::array<double, 8> xgk = {
        0.991455371120813, 0.949107912342759, 0.864864423359769,
        0.741531185599394, 0.586087235467691, 0.405845151377397,
        0.207784955007898, 0.000000000000000};
    constexpr std::array<double, 8> wgk = {
        0.022935322010529, 0.063092092629979, 0.104790010322250,
        0.140653259715525, 0.169004726639267, 0.190350578064785,
        0.204432940075298, 0.209482141084728};
    constexpr std::array<double, 4> wg = {0.129484966168870, 0.279705391489277,
                                          0.381830050505119, 0.417959183673469};
    gauss.fill(0.0);
    for (int i = 0; i < 8; ++i) {
      node[i] = -xgk[i];
      node[14 - i] = xgk[i];
      kronrod[i] = wgk[i];
      kronrod[14 - i] = wgk[i];
    }
    for (int i = 0; i < 4; ++i) {
      const int half = 2 * i + 1;  // Gauss nodes sit at odd half-indices
      gauss[half] = wg[i];
      gauss[14 - half] = wg[i];
    }
    gauss[7] = wg[3];
  }
};

inline const GaussKronrod15& gk15() {
  static const GaussKronrod15 rule;
  return rule;
}

constexpr int kMaxQuadratureDim = 3;

struct QuadratureCell {
  std::array<double, kMaxQuadratureDim> lo;
  std::array<double, kMaxQuadratureDim> hi;
  double value;
  double error;
  bool split = false;
};

// Tensor GK15 over one cell: value and embedded error from a single sweep of
// 15^dim integrand evaluations.
template <class F>
void evaluate_cell(F&& f, int dim, QuadratureCell& cell) {
  const GaussKronrod15& rule = gk15();
  std::array<double, kMaxQuadratureDim> mid{}, half{};
  for (int d = 0; d < dim; ++d) {
    mid[d] = 0.5 * (cell.lo[d] + cell.hi[d]);
    half[d] = 0.5 * (cell.hi[d] - cell.lo[d]);
  }
  long total = 1;
  for (int d = 0; d < dim; ++d) total *= 15;
  double acc_k = 0.0, acc_g = 0.0;
  std::array<double, kMaxQuadratureDim> x{};
  for (long t = 0; t < total; ++t) {
    long r = t;
    double wk = 1.0, wg = 1.0;
    for (int d = 0; d < dim; ++d) {
      const int i = static_cast<int>(r % 15);
      r /= 15;
      x[d] = mid[d] + half[d] * rule.node[i];
      wk *= half[d] * rule.kronrod[i];
      wg *= half[d] * rule.gauss[i];
    }
    const double fx = f(x.data());
    acc_k += wk * fx;
    acc_g += wg * fx;
  }
  cell.value = acc_k;
  cell.error = std::abs(acc_k - acc_g);
}

}  // namespace detail

// Adaptive subdivision with the embedded GK7/15 rule on each axis. Worst cell
// first, split along its widest axis, until the summed error estimate drops
// below tol or the cell budget runs out. Serial and deterministic: the final
// value is the compensated sum over leaf cells in creation order.
template <class F>
QuadratureResult integrate_adaptive(F&& f, int dim, const double* lo,
                                    const double* hi, double tol,
                                    long max_cells = 200000) {
  if (dim < 1 || dim > detail::kMaxQuadratureDim)
    throw ValidationError("integrate_adaptive: dim must be 1, 2 or 3");
  if (!(tol > 0.0)) throw ValidationError("integrate_adaptive: tol must be > 0");

  std::vector<detail::QuadratureCell> cells;
  cells.reserve(1024);
  detail::QuadratureCell root{};
  for (int d = 0; d < dim; ++d) {
    if (!(lo[d] <= hi[d]))
      throw ValidationError("integrate_adaptive: empty box, lo > hi");
    root.lo[d] = lo[d];
    root.hi[d] = hi[d];
  }
  detail::evaluate_cell(f, dim, root);
  cells.push_back(root);
  long evaluations = 1;

  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry> queue;
  queue.emplace(root.error, 0);
  double total_error = root.error;

  while (total_error > tol && !queue.empty()) {
    if (static_cast<long>(cells.size()) + 2 > 2 * max_cells - 1) break;
    const auto [err, idx] = queue.top();
    queue.pop();
    if (err <= 0.0) break;  // nothing left to refine

    detail::QuadratureCell parent = cells[idx];
    cells[idx].split = true;
    total_error -= parent.error;

    int axis = 0;
    double widest = parent.hi[0] - parent.lo[0];
    for (int d = 1; d < dim; ++d)
      if (parent.hi[d] - parent.lo[d] > widest) {
        widest = parent.hi[d] - parent.lo[d];
        axis = d;
      }
    const double mid = 0.5 * (parent.lo[axis] + parent.hi[axis]);
    for (int side = 0; side < 2; ++side) {
      detail::QuadratureCell child = parent;
      child.split = false;
      (side == 0 ? child.hi : child.lo)[axis] = mid;
      detail::evaluate_cell(f, dim, child);
      ++evaluations;
      total_error += child.error;
      queue.emplace(child.error, cells.size());
      cells.push_back(child);
    }
  }

  // Compensated (Kahan) sum over live leaves; creation order is deterministic.
  double value = 0.0, comp = 0.0, error = 0.0;
  long leaves = 0;
  for (const auto& cell : cells) {
    if (cell.split) continue;
    const double y = cell.value - comp;
    const double t = value + y;
    comp = (t - value) - y;
    value = t;
    error += cell.error;
    ++leaves;
  }

  long per_cell = 1;
  for (int d = 0; d < dim; ++d) per_cell *= 15;
  if (error > tol) {
    std::ostringstream os;
    os << "adaptive quadrature: error estimate " << error
       << " did not reach tol " << tol << " within " << leaves
       << " cells (best value " << value << ")";
    throw QuadratureError(os.str(), value, error);
  }
  return QuadratureResult{value, error, evaluations * per_cell, leaves};
}

}  // namespace rmt
