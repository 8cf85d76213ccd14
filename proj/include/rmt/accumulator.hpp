#pragma once

#include <cmath>

#include "rmt/types.hpp"

namespace rmt {

// Streaming mean / variance in Welford form. merge() implements the pairwise
// update, so combining per-worker accumulators in a fixed order reproduces the
// sequential result up to the usual floating-point reassociation.
class Accumulator {
 public:
  void push(double x) {
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
  }

  void merge(const Accumulator& other) {
    if (other.count_ == 0) return;
    if (count_ == 0) {
      *this = other;
      return;
    }
    const double na = static_cast<double>(count_);
    const double nb = static_cast<double>(other.count_);
    const double delta = other.mean_ - mean_;
    mean_ += delta * nb / (na + nb);
    m2_ += other.m2_ + delta * delta * na * nb / (na + nb);
    count_ += other.count_;
  }

  long count() const { return count_; }
  double mean() const { return mean_; }

  // Unbiased sample variance; 0 until two values arrive.
  double variance() const {
    return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0;
  }

  // Standard error of the mean.
  double standard_error() const {
    return count_ > 1 ? std::sqrt(variance() / static_cast<double>(count_)) : 0.0;
  }

 private:
  long count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace rmt
