#pragma once

#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

namespace rmt {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// Inputs that violate a documented precondition, invariant or schema.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An algorithm failed to reach its accuracy target (solver non-convergence,
// exhausted subdivision budget, divergent moment, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rmt
