#pragma once

#include <functional>
#include <span>

namespace rrnet {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int panels = 0;
  bool converged = false;
};

/// 64-point Gauss-Legendre nodes and weights on [-1, 1], ascending.
std::span<const double> gauss_legendre_nodes();
std::span<const double> gauss_legendre_weights();

/// Composite 64-point Gauss-Legendre with adaptive bisection of each panel
/// until a panel and its two halves agree to `tol * max(1, |total|)`.
/// `breakpoints` (sorted, inside (a, b)) seed the initial panels, e.g. kinks.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b, double tol = 1e-14,
                                    std::span<const double> breakpoints = {}, int max_depth = 40);

}  // namespace rrnet
