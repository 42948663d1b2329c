#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace rrnet {

/// Mean of the smallest ceil((1 - trim) n) squared errors.
double tmse(const Eigen::VectorXd& y, const Eigen::VectorXd& fitted, double trim_fraction);
double mse(const Eigen::VectorXd& y, const Eigen::VectorXd& fitted);

struct Summary {
  double mean = 0.0;
  double stderr_ = 0.0;  // sample sd / sqrt(count); 0 for a single value
  std::size_t count = 0;
};

/// NaN entries (missing cells) are skipped.
Summary summarize(const std::vector<double>& values);

/// Per-method outcome of a replication sweep. Missing replications hold NaN.
struct MetricReport {
  double trim_fraction = 0.0;
  std::vector<double> train_tmse;
  std::vector<double> test_mse;

  Summary tmse_summary() const { return summarize(train_tmse); }
  Summary test_summary() const { return summarize(test_mse); }
};

}  // namespace rrnet
