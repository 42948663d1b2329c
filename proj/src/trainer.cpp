#include "rrnet/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rrnet/format.hpp"
#include "rrnet/rng.hpp"

namespace rrnet {

void TrainConfig::validate() const {
  if (epochs == 0) throw InvalidArgument("epochs per outer iteration must be at least 1");
  if (batch_size == 0) throw InvalidArgument("batch size must be at least 1");
  if (max_outer == 0) throw InvalidArgument("max outer iterations must be at least 1");
  if (!(gtol > 0.0) || !(tol > 0.0)) throw InvalidArgument("tolerances must be positive");
  if (!(adam.learning_rate > 0.0) || !(adam.eps > 0.0)) throw InvalidArgument("ADAM step size and eps must be positive");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0) || !(adam.beta2 >= 0.0 && adam.beta2 < 1.0))
    throw InvalidArgument("ADAM decay rates must lie in [0, 1)");
}

std::string FitResult::trace_csv() const {
  std::string out = "outer,loss,sigma,descent_ok\n";
  double prev = initial_loss;
  for (std::size_t k = 0; k < loss_trace.size(); ++k) {
    const bool ok = loss_trace[k] <= prev + 1e-12;
    out += std::to_string(k + 1) + "," + format_double(loss_trace[k]) + "," +
           format_double(k < sigma_trace.size() ? sigma_trace[k] : sigma) + "," + (ok ? "1" : "0") + "\n";
    prev = loss_trace[k];
  }
  return out;
}

double mad_scale(const Eigen::VectorXd& r, double floor) {
  if (r.size() == 0) throw InvalidArgument("MAD of an empty residual vector");
  auto median = [](std::vector<double> v) {
    const std::size_t n = v.size();
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n / 2), v.end());
    double hi = v[n / 2];
    if (n % 2 == 1) return hi;
    double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n / 2));
    return 0.5 * (lo + hi);
  };
  std::vector<double> v(r.data(), r.data() + r.size());
  const double med = median(v);
  for (auto& x : v) x = std::abs(x - med);
  return std::max(1.4826 * median(std::move(v)), floor);
}

double init_sigma_mad(const NetworkSpec& spec, const ParamVector& theta0, const Dataset& data, double floor) {
  if (data.empty()) throw InvalidArgument("cannot initialize sigma from an empty dataset");
  return mad_scale(residuals(spec, theta0, data), floor);
}

std::uint64_t outer_seed(std::uint64_t seed, std::size_t k) {
  return splitmix64(seed ^ splitmix64(0x6f75746572ULL + k));
}

ParamVector adam_theta_update(const DpdConfig& cfg, const NetworkSpec& spec, const ParamVector& theta, double sigma,
                              const Dataset& data, const TrainConfig& tc, std::uint64_t seed) {
  if (sigma < cfg.sigma_floor) throw InvalidArgument("sigma below the configured floor");
  auto grad = [&](const ParamVector& th, std::span<const std::size_t> batch) {
    return grad_theta_loss(cfg, spec, th, sigma, data, batch, tc.kink);
  };
  return run_adam_epochs(theta, data.size(), tc.epochs, tc.batch_size, tc.adam, seed, grad);
}

double sigma_update_qn(const DpdConfig& cfg, const Eigen::VectorXd& r, double sigma_init, const TrainConfig& tc) {
  const double lo = cfg.sigma_floor;
  double s = std::max(sigma_init, lo);
  double fs = loss_from_residuals(cfg, r, s);
  double gs = grad_sigma_from_residuals(cfg, r, s);
  if (!std::isfinite(fs) || !std::isfinite(gs)) throw SigmaSolveError("scale objective is not finite", s);

  double inv_curv = 1.0;
  for (std::size_t it = 0; it < tc.max_sigma_iters; ++it) {
    if (std::abs(gs) < tc.gtol) break;
    if (s <= lo && gs > 0.0) break;  // projected gradient vanishes on the bound

    // at most a tenfold change of scale per iteration
    const double step = std::clamp(-inv_curv * gs, -0.9 * s, 9.0 * s);
    double t = 1.0;
    double cand = s;
    double fc = fs;
    bool accepted = false;
    for (int k = 0; k < 60; ++k) {
      cand = std::max(lo, s + t * step);
      fc = loss_from_residuals(cfg, r, cand);
      if (std::isfinite(fc) && fc <= fs + 1e-4 * gs * (cand - s)) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted || cand == s) break;
    const double gc = grad_sigma_from_residuals(cfg, r, cand);
    if (!std::isfinite(gc)) throw SigmaSolveError("scale gradient is not finite", s);
    const double ds = cand - s;
    const double dg = gc - gs;
    if (ds * dg > 0.0) {
      inv_curv = ds / dg;
    } else {
      inv_curv *= 4.0;
    }
    s = cand;
    fs = fc;
    gs = gc;
  }
  return s;
}

double sigma_update_qn(const DpdConfig& cfg, const NetworkSpec& spec, const ParamVector& theta, const Dataset& data,
                       double sigma_init, const TrainConfig& tc) {
  return sigma_update_qn(cfg, residuals(spec, theta, data), sigma_init, tc);
}

double sigma_update_fixed_point(const DpdConfig& cfg, const Eigen::VectorXd& r, double sigma_init,
                                const TrainConfig& tc) {
  if (!cfg.model.is_gaussian())
    throw UnsupportedModel("the fixed-point scale update is only available for the Gaussian model, not " +
                           cfg.model.name());
  if (r.size() == 0) throw InvalidArgument("scale update on an empty dataset");
  const double b = cfg.beta;
  const double lo = cfg.sigma_floor;
  const double n = static_cast<double>(r.size());
  double s = std::max(sigma_init, lo);
  for (int it = 0; it < 10000; ++it) {
    double num = 0.0;
    double den = 0.0;
    const double inv = b / (2.0 * s * s);
    for (Eigen::Index i = 0; i < r.size(); ++i) {
      const double w = std::exp(-inv * r[i] * r[i]);
      num += w * r[i] * r[i];
      den += w;
    }
    // Root of the scale gradient: sum w (1 - r^2 / s^2) = n b / (1 + b)^{3/2}.
    den -= n * b / std::pow(1.0 + b, 1.5);
    if (!(den > 0.0)) return sigma_update_qn(cfg, r, sigma_init, tc);
    const double next = std::max(lo, std::sqrt(num / den));
    if (!std::isfinite(next)) throw SigmaSolveError("fixed-point scale iterate is not finite", s);
    const bool done = std::abs(next - s) < 1e-10 * s;
    s = next;
    if (done) break;
  }
  return s;
}

double sigma_update_fixed_point(const DpdConfig& cfg, const NetworkSpec& spec, const ParamVector& theta,
                                const Dataset& data, double sigma_init, const TrainConfig& tc) {
  return sigma_update_fixed_point(cfg, residuals(spec, theta, data), sigma_init, tc);
}

namespace {

void check_fit_inputs(const NetworkSpec& spec, const Dataset& data) {
  spec.validate();
  if (data.empty()) throw InvalidArgument("cannot fit on an empty dataset");
  data.validate();
  if (data.dim() != spec.input_dim)
    throw ShapeError(0, "dataset has " + std::to_string(data.dim()) + " features, network expects " +
                            std::to_string(spec.input_dim));
}

}  // namespace

FitResult fit(const DpdConfig& cfg, const NetworkSpec& spec, const Dataset& data, const TrainConfig& tc) {
  cfg.validate();
  tc.validate();
  check_fit_inputs(spec, data);

  FitResult res;
  ParamVector theta = glorot_init(spec, tc.seed);
  double sigma = init_sigma_mad(spec, theta, data, cfg.sigma_floor);
  double prev = loss(cfg, spec, theta, sigma, data);
  res.initial_loss = prev;
  const bool full_batch = tc.batch_size >= data.size();

  for (std::size_t k = 1; k <= tc.max_outer; ++k) {
    const std::uint64_t seed_k = outer_seed(tc.seed, k);
    ParamVector next = adam_theta_update(cfg, spec, theta, sigma, data, tc, seed_k);
    if (full_batch && tc.descent_guard) {
      const double before = loss(cfg, spec, theta, sigma, data);
      double after = loss(cfg, spec, next, sigma, data);
      TrainConfig retry = tc;
      for (int attempt = 0; attempt < 8 && !(after <= before); ++attempt) {
        retry.adam.learning_rate *= 0.5;
        next = adam_theta_update(cfg, spec, theta, sigma, data, retry, seed_k);
        after = loss(cfg, spec, next, sigma, data);
      }
      if (!(after <= before)) next = theta;
    }

    const Eigen::VectorXd r = residuals(spec, next, data);
    const double entry = loss_from_residuals(cfg, r, sigma);
    double sigma_next = tc.sigma_solver == SigmaSolver::FixedPoint ? sigma_update_fixed_point(cfg, r, sigma, tc)
                                                                   : sigma_update_qn(cfg, r, sigma, tc);
    double current = loss_from_residuals(cfg, r, sigma_next);
    if (!(current <= entry)) {
      sigma_next = sigma;
      current = entry;
    }
    if (!std::isfinite(current)) throw NumericError("DPD loss became non-finite at outer iteration " + std::to_string(k));

    theta = std::move(next);
    sigma = sigma_next;
    res.loss_trace.push_back(current);
    res.sigma_trace.push_back(sigma);
    if (current > prev + 1e-12) ++res.descent_violations;
    const bool significant = current < prev - tc.tol;
    prev = current;
    if (!significant) break;
  }
  res.theta = std::move(theta);
  res.sigma = sigma;
  res.outer_iters = res.loss_trace.size();
  return res;
}

Eigen::VectorXd predict(const NetworkSpec& spec, const ParamVector& theta, const Eigen::MatrixXd& xs) {
  return forward_batch(spec, theta, xs);
}

}  // namespace rrnet
