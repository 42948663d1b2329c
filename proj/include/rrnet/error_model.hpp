#pragma once

#include <string>

namespace rrnet {

enum class ErrorFamily { Gaussian, Laplace, Logistic };

/// Standardized (mean 0, variance 1) symmetric error density f with its
/// score u = (log f)', the psi-functions and the constants
///   C^{(beta)}_{i,j} = int s^i u(s)^j f(s)^{1+beta} ds.
///
/// Laplace has scale 1/sqrt(2) and score -sqrt(2) sign(s) with u(0) = 0;
/// Logistic has scale sqrt(3)/pi.
class ErrorModel {
 public:
  ErrorModel() = default;
  explicit ErrorModel(ErrorFamily family) : family_(family) {}

  static ErrorModel gaussian() { return ErrorModel(ErrorFamily::Gaussian); }
  static ErrorModel laplace() { return ErrorModel(ErrorFamily::Laplace); }
  static ErrorModel logistic() { return ErrorModel(ErrorFamily::Logistic); }

  ErrorFamily family() const { return family_; }
  bool is_gaussian() const { return family_ == ErrorFamily::Gaussian; }
  std::string name() const;
  static ErrorModel parse(const std::string& text);

  double log_density(double s) const;
  double density(double s) const;
  double score(double s) const;
  /// u(s) f(s)^beta
  double psi1(double beta, double s) const;
  /// (1 + s u(s)) f(s)^beta
  double psi2(double beta, double s) const;

  /// Closed form where one is known (Gaussian (0,0), (0,2), (2,2), (1,2)),
  /// otherwise `c_constant_quadrature`.
  double c_constant(int i, int j, double beta) const;
  /// Always by adaptive composite Gauss-Legendre on [-R, R] with R grown
  /// from 40 until the integrand at the boundary is below 1e-16.
  double c_constant_quadrature(int i, int j, double beta) const;
  /// C_{2,2} - (1 - beta) / (1 + beta) C_{0,0}, the sigma-IF normalizer.
  double c_tilde_22(double beta) const;

  friend bool operator==(const ErrorModel&, const ErrorModel&) = default;

 private:
  ErrorFamily family_ = ErrorFamily::Gaussian;
};

}  // namespace rrnet
