// Points on the probability simplex with support tracking.
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "pqec/errors.hpp"

namespace pqec {

inline constexpr double kSupportEps = 1e-12;

class MixtureWeights {
 public:
  explicit MixtureWeights(std::vector<double> weights, double sum_tol = 1e-10)
      : weights_(std::move(weights)) {
    double sum = 0.0;
    for (double w : weights_) {
      if (w < -kSupportEps) throw invalid_weights_error("MixtureWeights: negative weight");
      sum += w;
    }
    if (std::abs(sum - 1.0) > sum_tol)
      throw invalid_weights_error("MixtureWeights: weights do not sum to 1");
  }

  static MixtureWeights unit(std::size_t size, std::size_t index) {
    std::vector<double> w(size, 0.0);
    w.at(index) = 1.0;
    return MixtureWeights(std::move(w));
  }

  const std::vector<double>& weights() const { return weights_; }
  double operator[](std::size_t k) const { return weights_[k]; }
  std::size_t size() const { return weights_.size(); }

  std::vector<std::size_t> support() const {
    std::vector<std::size_t> s;
    for (std::size_t k = 0; k < weights_.size(); ++k)
      if (weights_[k] > kSupportEps) s.push_back(k);
    return s;
  }

  std::size_t support_size() const { return support().size(); }

 private:
  std::vector<double> weights_;
};

}  // namespace pqec
