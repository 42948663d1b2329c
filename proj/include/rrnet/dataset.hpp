#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace rrnet {

/// Regression sample: row i of `x` is the feature vector of response y[i].
struct Dataset {
  Eigen::MatrixXd x;  // n x p
  Eigen::VectorXd y;  // n
  std::vector<bool> contaminated;  // n; all false for real or clean data

  std::size_t size() const { return static_cast<std::size_t>(y.size()); }
  std::size_t dim() const { return static_cast<std::size_t>(x.cols()); }
  bool empty() const { return y.size() == 0; }

  /// Rows at `indices`, in that order.
  Dataset subset(const std::vector<std::size_t>& indices) const;
  /// Throws InvalidArgument on inconsistent shapes or non-finite values.
  void validate() const;
};

}  // namespace rrnet
