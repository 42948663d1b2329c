#include "rrnet/dpd_loss.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "rrnet/error.hpp"

namespace rrnet {

namespace {

// C_{0,0} is needed on every loss evaluation; for non-Gaussian models it
// comes from quadrature, so keep the last few per thread.
double c00(const ErrorModel& model, double beta) {
  if (model.is_gaussian()) return model.c_constant(0, 0, beta);
  struct Entry {
    ErrorFamily family;
    double beta;
    double value;
  };
  thread_local std::vector<Entry> cache;
  for (const auto& e : cache)
    if (e.family == model.family() && e.beta == beta) return e.value;
  const double v = model.c_constant(0, 0, beta);
  if (cache.size() >= 16) cache.erase(cache.begin());
  cache.push_back({model.family(), beta, v});
  return v;
}

void check_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("sigma must be positive and finite");
}

}  // namespace

void DpdConfig::validate() const {
  if (!(beta >= 0.0 && beta <= 1.0))
    throw InvalidArgument("beta must lie in [0, 1]; larger values lose too much efficiency (got " +
                          std::to_string(beta) + ")");
  if (!(sigma_floor > 0.0) || !std::isfinite(sigma_floor)) throw InvalidArgument("sigma floor must be positive");
}

double v_beta(const DpdConfig& cfg, double residual, double sigma) {
  check_sigma(sigma);
  const double s = residual / sigma;
  if (cfg.beta == 0.0) return std::log(sigma) - cfg.model.log_density(s);
  const double b = cfg.beta;
  const double sb = std::pow(sigma, -b);
  return sb * c00(cfg.model, b) - (1.0 + 1.0 / b) * sb * std::exp(b * cfg.model.log_density(s)) + 1.0 / b;
}

double v_beta(const DpdConfig& cfg, const NetworkSpec& spec, const ParamVector& theta, double sigma, double y,
              std::span<const double> x) {
  return v_beta(cfg, y - forward(spec, theta, x), sigma);
}

double loss_from_residuals(const DpdConfig& cfg, const Eigen::VectorXd& r, double sigma) {
  if (r.size() == 0) throw InvalidArgument("loss of an empty dataset is undefined");
  check_sigma(sigma);
  const double n = static_cast<double>(r.size());
  const double b = cfg.beta;
  if (b == 0.0) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < r.size(); ++i) acc += cfg.model.log_density(r[i] / sigma);
    return std::log(sigma) - acc / n;
  }
  const double sb = std::pow(sigma, -b);
  double acc = 0.0;
  if (cfg.model.is_gaussian()) {
    // w_i = exp(-beta r_i^2 / (2 sigma^2)); f^beta = (2 pi)^{-beta/2} w_i
    const double inv = b / (2.0 * sigma * sigma);
    for (Eigen::Index i = 0; i < r.size(); ++i) acc += std::exp(-inv * r[i] * r[i]);
    acc *= std::pow(2.0 * std::numbers::pi, -0.5 * b);
  } else {
    for (Eigen::Index i = 0; i < r.size(); ++i) acc += std::exp(b * cfg.model.log_density(r[i] / sigma));
  }
  return sb * c00(cfg.model, b) - (1.0 + 1.0 / b) * sb * acc / n + 1.0 / b;
}

double grad_sigma_from_residuals(const DpdConfig& cfg, const Eigen::VectorXd& r, double sigma) {
  if (r.size() == 0) throw InvalidArgument("gradient over an empty dataset is undefined");
  check_sigma(sigma);
  const double n = static_cast<double>(r.size());
  const double b = cfg.beta;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) acc += cfg.model.psi2(b, r[i] / sigma);
  const double scale = std::pow(sigma, -(1.0 + b));
  double g = (1.0 + b) * scale * acc / n;
  if (b > 0.0) g -= b * c00(cfg.model, b) * scale;
  return g;
}

Eigen::VectorXd residuals(const NetworkSpec& spec, const ParamVector& theta, const Dataset& data) {
  return data.y - forward_batch(spec, theta, data.x);
}

double loss(const DpdConfig& cfg, const NetworkSpec& spec, const ParamVector& theta, double sigma, const Dataset& data) {
  if (data.empty()) throw InvalidArgument("loss of an empty dataset is undefined");
  return loss_from_residuals(cfg, residuals(spec, theta, data), sigma);
}

Eigen::MatrixXd gather_columns(const Dataset& data, std::span<const std::size_t> batch) {
  if (batch.empty()) return data.x.transpose();
  Eigen::MatrixXd cols(data.x.cols(), static_cast<Eigen::Index>(batch.size()));
  for (std::size_t k = 0; k < batch.size(); ++k)
    cols.col(static_cast<Eigen::Index>(k)) = data.x.row(static_cast<Eigen::Index>(batch[k])).transpose();
  return cols;
}

ParamVector grad_theta_loss(const DpdConfig& cfg, const NetworkSpec& spec, const ParamVector& theta, double sigma,
                            const Dataset& data, std::span<const std::size_t> batch, KinkConvention kink) {
  if (data.empty()) throw InvalidArgument("gradient over an empty dataset is undefined");
  check_sigma(sigma);
  const Eigen::MatrixXd cols = gather_columns(data, batch);
  const ForwardCache cache = forward_cached(spec, theta, cols);
  const Eigen::Index m = cols.cols();
  const double b = cfg.beta;
  const double scale = (1.0 + b) / (static_cast<double>(m) * std::pow(sigma, 1.0 + b));
  Eigen::VectorXd coeffs(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const double y = batch.empty() ? data.y[k] : data.y[static_cast<Eigen::Index>(batch[static_cast<std::size_t>(k)])];
    coeffs[k] = scale * cfg.model.psi1(b, (y - cache.output[k]) / sigma);
  }
  ParamVector g = ParamVector::Zero(theta.size());
  accumulate_vjp(spec, theta, cache, coeffs, kink, g);
  return g;
}

double grad_sigma_loss(const DpdConfig& cfg, const NetworkSpec& spec, const ParamVector& theta, double sigma,
                       const Dataset& data) {
  if (data.empty()) throw InvalidArgument("gradient over an empty dataset is undefined");
  return grad_sigma_from_residuals(cfg, residuals(spec, theta, data), sigma);
}

}  // namespace rrnet
