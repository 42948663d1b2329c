#include "rrnet/quadrature.hpp"

#include <array>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace rrnet {

namespace {

constexpr int kOrder = 64;

struct Rule {
  std::array<double, kOrder> x{};
  std::array<double, kOrder> w{};
};

// Newton iteration on P_n from the Chebyshev-like initial guess.
Rule build_rule() {
  Rule r;
  const int n = kOrder;
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) < 1e-16) break;
    }
    r.x[i] = -z;
    r.x[n - 1 - i] = z;
    r.w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    r.w[n - 1 - i] = r.w[i];
  }
  return r;
}

const Rule& rule() {
  static const Rule r = build_rule();
  return r;
}

double panel(const std::function<double(double)>& f, double a, double b) {
  const Rule& r = rule();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double s = 0.0;
  for (int k = 0; k < kOrder; ++k) s += r.w[k] * f(mid + half * r.x[k]);
  return half * s;
}

}  // namespace

std::span<const double> gauss_legendre_nodes() { return rule().x; }
std::span<const double> gauss_legendre_weights() { return rule().w; }

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b, double tol,
                                    std::span<const double> breakpoints, int max_depth) {
  struct Panel {
    double a, b, whole;
    int depth;
  };
  std::vector<double> edges{a};
  for (double bp : breakpoints)
    if (bp > a && bp < b) edges.push_back(bp);
  edges.push_back(b);

  std::vector<Panel> stack;
  double rough = 0.0;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    double w = panel(f, edges[k], edges[k + 1]);
    rough += w;
    stack.push_back({edges[k], edges[k + 1], w, 0});
  }
  const double scale = std::max(1.0, std::abs(rough));

  QuadratureResult res;
  res.converged = true;
  // Pop in LIFO order; sums are accumulated in a fixed order so the result is reproducible.
  while (!stack.empty()) {
    Panel p = stack.back();
    stack.pop_back();
    const double mid = 0.5 * (p.a + p.b);
    const double left = panel(f, p.a, mid);
    const double right = panel(f, mid, p.b);
    const double diff = std::abs(left + right - p.whole);
    const double local_tol = std::max(tol * scale * (p.b - p.a) / (b - a),
                                      64.0 * std::numeric_limits<double>::epsilon() * (std::abs(left) + std::abs(right)));
    if (diff <= local_tol || p.depth >= max_depth) {
      if (diff > local_tol) res.converged = false;
      res.value += left + right;
      res.error_estimate += diff;
      ++res.panels;
    } else {
      stack.push_back({mid, p.b, right, p.depth + 1});
      stack.push_back({p.a, mid, left, p.depth + 1});
    }
  }
  return res;
}

}  // namespace rrnet
