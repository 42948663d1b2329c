#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rrnet/dataset.hpp"

namespace rrnet {

enum class ScalePolicy { None, Covariates, All };

/// Min-max map applied to one column: scaled = (v - min) / range, with
/// range = 0 meaning a constant column mapped to 0.
struct ColumnScale {
  double min = 0.0;
  double range = 1.0;

  double forward(double v) const { return range > 0.0 ? (v - min) / range : 0.0; }
  double inverse(double s) const { return min + s * range; }
};

struct LoadedCsv {
  Dataset data;
  std::vector<std::string> feature_names;
  std::string response_name;
  std::vector<ColumnScale> feature_scales;  // empty when not scaled
  ColumnScale response_scale;               // identity unless ScalePolicy::All
  std::vector<std::string> warnings;

  /// Original-unit covariates / responses.
  Eigen::MatrixXd unscale_x(const Eigen::MatrixXd& scaled) const;
  Eigen::VectorXd unscale_y(const Eigen::VectorXd& scaled) const;
};

/// Numeric CSV with a header row. `response` names a header column or is a
/// 1-based column number; empty selects the last column. ParseError carries 1-based row (the header is row
/// 1) and column.
LoadedCsv load_csv(const std::string& path, const std::string& response, ScalePolicy policy);
LoadedCsv parse_csv(const std::string& text, const std::string& source, const std::string& response,
                    ScalePolicy policy);

ScalePolicy parse_scale_policy(const std::string& text);

}  // namespace rrnet
