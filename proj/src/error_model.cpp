#include "rrnet/error_model.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "rrnet/error.hpp"
#include "rrnet/quadrature.hpp"

namespace rrnet {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
const double kLogisticRate = std::numbers::pi / std::sqrt(3.0);  // 1 / scale

double log1pexp(double x) { return x > 30.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

}  // namespace

std::string ErrorModel::name() const {
  switch (family_) {
    case ErrorFamily::Gaussian:
      return "gaussian";
    case ErrorFamily::Laplace:
      return "laplace";
    case ErrorFamily::Logistic:
      return "logistic";
  }
  return "gaussian";
}

ErrorModel ErrorModel::parse(const std::string& text) {
  if (text == "gaussian" || text == "normal") return gaussian();
  if (text == "laplace") return laplace();
  if (text == "logistic") return logistic();
  throw InvalidArgument("unknown error model '" + text + "' (expected gaussian, laplace or logistic)");
}

double ErrorModel::log_density(double s) const {
  switch (family_) {
    case ErrorFamily::Gaussian:
      return -0.5 * s * s - 0.5 * std::log(2.0 * std::numbers::pi);
    case ErrorFamily::Laplace:
      return -kSqrt2 * std::abs(s) - 0.5 * std::log(2.0);
    case ErrorFamily::Logistic: {
      // f(s) = k e^{-k s} / (1 + e^{-k s})^2 with k = pi / sqrt(3); symmetric in s.
      const double a = kLogisticRate * std::abs(s);
      return std::log(kLogisticRate) - a - 2.0 * log1pexp(-a);
    }
  }
  return 0.0;
}

double ErrorModel::density(double s) const { return std::exp(log_density(s)); }

double ErrorModel::score(double s) const {
  switch (family_) {
    case ErrorFamily::Gaussian:
      return -s;
    case ErrorFamily::Laplace:
      if (s > 0.0) return -kSqrt2;
      if (s < 0.0) return kSqrt2;
      return 0.0;
    case ErrorFamily::Logistic:
      return -kLogisticRate * std::tanh(0.5 * kLogisticRate * s);
  }
  return 0.0;
}

double ErrorModel::psi1(double beta, double s) const {
  return score(s) * std::exp(beta * log_density(s));
}

double ErrorModel::psi2(double beta, double s) const {
  return (1.0 + s * score(s)) * std::exp(beta * log_density(s));
}

double ErrorModel::c_constant(int i, int j, double beta) const {
  if (i < 0 || j < 0) throw InvalidArgument("C-constant indices must be non-negative");
  if (!(beta >= 0.0)) throw InvalidArgument("C-constant needs beta >= 0 (the integral diverges otherwise)");
  if (family_ == ErrorFamily::Gaussian) {
    const double c00 = std::pow(2.0 * std::numbers::pi, -0.5 * beta) / std::sqrt(1.0 + beta);
    if (i == 0 && j == 0) return c00;
    if (i == 0 && j == 2) return c00 / (1.0 + beta);
    if (i == 2 && j == 2) return 3.0 * c00 / ((1.0 + beta) * (1.0 + beta));
    if (i == 1 && j == 2) return 0.0;
  }
  return c_constant_quadrature(i, j, beta);
}

double ErrorModel::c_constant_quadrature(int i, int j, double beta) const {
  if (i < 0 || j < 0) throw InvalidArgument("C-constant indices must be non-negative");
  if (!(beta >= 0.0) || !std::isfinite(beta))
    throw NumericError("C-constant integral does not converge for beta = " + std::to_string(beta));
  auto integrand = [this, i, j, beta](double s) {
    const double u = score(s);
    return std::pow(s, i) * std::pow(u, j) * std::exp((1.0 + beta) * log_density(s));
  };
  double R = 40.0;
  while (std::max(std::abs(integrand(R)), std::abs(integrand(-R))) * R > 1e-16) {
    R *= 2.0;
    if (R > 1e4) throw NumericError("C-constant tail does not decay; integral not convergent");
  }
  const std::array<double, 1> kink{0.0};
  QuadratureResult q = integrate_adaptive(integrand, -R, R, 1e-14, kink);
  if (!q.converged || !std::isfinite(q.value))
    throw NumericError("C-constant quadrature failed to converge for (i, j) = (" + std::to_string(i) + ", " +
                       std::to_string(j) + ")");
  return q.value;
}

double ErrorModel::c_tilde_22(double beta) const {
  return c_constant(2, 2, beta) - (1.0 - beta) / (1.0 + beta) * c_constant(0, 0, beta);
}

}  // namespace rrnet
