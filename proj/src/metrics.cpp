#include "rrnet/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "rrnet/error.hpp"

namespace rrnet {

double tmse(const Eigen::VectorXd& y, const Eigen::VectorXd& fitted, double trim_fraction) {
  if (!(trim_fraction >= 0.0 && trim_fraction < 1.0)) throw InvalidArgument("trim fraction must lie in [0, 1)");
  if (y.size() != fitted.size())
    throw ShapeError(0, "response has " + std::to_string(y.size()) + " entries, fitted values " +
                            std::to_string(fitted.size()));
  if (y.size() == 0) throw InvalidArgument("trimmed MSE of an empty sample");
  std::vector<double> sq(static_cast<std::size_t>(y.size()));
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double e = y[i] - fitted[i];
    sq[static_cast<std::size_t>(i)] = e * e;
  }
  const double n = static_cast<double>(sq.size());
  // (1 - 0.3) * 100 is 70.00000000000001 in binary
  const auto keep = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil((1.0 - trim_fraction) * n - 1e-9)), 1,
                                            sq.size());
  std::sort(sq.begin(), sq.end());
  double acc = 0.0;
  for (std::size_t k = 0; k < keep; ++k) acc += sq[k];
  return acc / static_cast<double>(keep);
}

double mse(const Eigen::VectorXd& y, const Eigen::VectorXd& fitted) { return tmse(y, fitted, 0.0); }

Summary summarize(const std::vector<double>& values) {
  Summary s;
  double sum = 0.0;
  for (double v : values)
    if (!std::isnan(v)) {
      sum += v;
      ++s.count;
    }
  if (s.count == 0) {
    s.mean = std::nan("");
    s.stderr_ = std::nan("");
    return s;
  }
  s.mean = sum / static_cast<double>(s.count);
  if (s.count > 1) {
    double ss = 0.0;
    for (double v : values)
      if (!std::isnan(v)) ss += (v - s.mean) * (v - s.mean);
    s.stderr_ = std::sqrt(ss / static_cast<double>(s.count - 1) / static_cast<double>(s.count));
  }
  return s;
}

}  // namespace rrnet
