#include "rrnet/competitors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "rrnet/dpd_loss.hpp"
#include "rrnet/error.hpp"

namespace rrnet {

CompetitorLoss CompetitorLoss::parse(const std::string& name) {
  if (name == "lse" || name == "mse") return mse();
  if (name == "mae") return mae();
  if (name == "lmls") return lmls();
  if (name == "huber") return huber();
  if (name == "tukey") return tukey();
  if (name == "lts") return lts();
  if (name == "lta") return lta();
  throw InvalidArgument("unknown competitor loss '" + name + "'");
}

std::string CompetitorLoss::name() const {
  switch (kind) {
    case CompetitorKind::MSE:
      return "lse";
    case CompetitorKind::MAE:
      return "mae";
    case CompetitorKind::LMLS:
      return "lmls";
    case CompetitorKind::Huber:
      return "huber";
    case CompetitorKind::Tukey:
      return "tukey";
    case CompetitorKind::LTS:
      return "lts";
    case CompetitorKind::LTA:
      return "lta";
  }
  return "lse";
}

void CompetitorLoss::validate() const {
  if ((kind == CompetitorKind::Huber || kind == CompetitorKind::Tukey) && !(c > 0.0))
    throw InvalidArgument(name() + " tuning constant must be positive");
  if (is_trimmed() && h && *h == 0) throw InvalidArgument("trimmed loss must keep at least one residual (h >= 1)");
}

std::size_t CompetitorLoss::kept(std::size_t n_eval, std::size_t n_full) const {
  if (!is_trimmed()) return n_eval;
  std::size_t h_full;
  if (h) {
    if (*h > n_full)
      throw InvalidArgument("trimming constant h = " + std::to_string(*h) + " exceeds the sample size " +
                            std::to_string(n_full));
    h_full = *h;
  } else {
    h_full = static_cast<std::size_t>(std::ceil(0.75 * static_cast<double>(n_full) - 1e-9));
  }
  if (n_eval == n_full) return std::max<std::size_t>(1, h_full);
  const double frac = static_cast<double>(h_full) / static_cast<double>(n_full);
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(frac * static_cast<double>(n_eval) - 1e-9)), 1,
                                 n_eval);
}

double competitor_rho(const CompetitorLoss& loss, double r) {
  const double a = std::abs(r);
  switch (loss.kind) {
    case CompetitorKind::MSE:
    case CompetitorKind::LTS:
      return r * r;
    case CompetitorKind::MAE:
    case CompetitorKind::LTA:
      return a;
    case CompetitorKind::LMLS:
      return std::log1p(0.5 * r * r);
    case CompetitorKind::Huber:
      return a <= loss.c ? 0.5 * r * r : loss.c * (a - 0.5 * loss.c);
    case CompetitorKind::Tukey: {
      const double c2 = loss.c * loss.c / 6.0;
      if (a > loss.c) return c2;
      const double q = 1.0 - (r / loss.c) * (r / loss.c);
      return c2 * (1.0 - q * q * q);
    }
  }
  return 0.0;
}

double competitor_rho_prime(const CompetitorLoss& loss, double r) {
  const double a = std::abs(r);
  const double sgn = r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0);
  switch (loss.kind) {
    case CompetitorKind::MSE:
    case CompetitorKind::LTS:
      return 2.0 * r;
    case CompetitorKind::MAE:
    case CompetitorKind::LTA:
      return sgn;
    case CompetitorKind::LMLS:
      return r / (1.0 + 0.5 * r * r);
    case CompetitorKind::Huber:
      return a <= loss.c ? r : loss.c * sgn;
    case CompetitorKind::Tukey: {
      if (a > loss.c) return 0.0;
      const double q = 1.0 - (r / loss.c) * (r / loss.c);
      return r * q * q;
    }
  }
  return 0.0;
}

namespace {

// Indices of the `keep` smallest rho values; ties broken by index so the
// set is deterministic.
std::vector<std::size_t> kept_set(const CompetitorLoss& loss, const Eigen::VectorXd& r, std::size_t keep) {
  std::vector<std::size_t> idx(static_cast<std::size_t>(r.size()));
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  auto key = [&](std::size_t i) { return competitor_rho(loss, r[static_cast<Eigen::Index>(i)]); };
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(keep), idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      const double ka = key(a), kb = key(b);
                      return ka < kb || (ka == kb && a < b);
                    });
  idx.resize(keep);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

double comp_loss(const CompetitorLoss& loss, const Eigen::VectorXd& r) {
  loss.validate();
  if (r.size() == 0) throw InvalidArgument("competitor loss of an empty residual vector");
  const auto n = static_cast<std::size_t>(r.size());
  if (loss.is_trimmed()) {
    const std::size_t keep = loss.kept(n, n);
    double acc = 0.0;
    for (std::size_t i : kept_set(loss, r, keep)) acc += competitor_rho(loss, r[static_cast<Eigen::Index>(i)]);
    return acc / static_cast<double>(keep);
  }
  double acc = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) acc += competitor_rho(loss, r[i]);
  return acc / static_cast<double>(n);
}

ParamVector comp_grad(const CompetitorLoss& loss, const NetworkSpec& spec, const ParamVector& theta,
                      const Dataset& data, std::span<const std::size_t> batch, KinkConvention kink) {
  loss.validate();
  if (data.empty()) throw InvalidArgument("competitor gradient over an empty dataset");
  const Eigen::MatrixXd cols = gather_columns(data, batch);
  const ForwardCache cache = forward_cached(spec, theta, cols);
  const Eigen::Index m = cols.cols();
  Eigen::VectorXd r(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const double y = batch.empty() ? data.y[k] : data.y[static_cast<Eigen::Index>(batch[static_cast<std::size_t>(k)])];
    r[k] = y - cache.output[k];
  }
  Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(m);
  if (loss.is_trimmed()) {
    const std::size_t keep = loss.kept(static_cast<std::size_t>(m), data.size());
    for (std::size_t i : kept_set(loss, r, keep)) {
      const auto k = static_cast<Eigen::Index>(i);
      coeffs[k] = -competitor_rho_prime(loss, r[k]) / static_cast<double>(keep);
    }
  } else {
    for (Eigen::Index k = 0; k < m; ++k) coeffs[k] = -competitor_rho_prime(loss, r[k]) / static_cast<double>(m);
  }
  ParamVector g = ParamVector::Zero(theta.size());
  accumulate_vjp(spec, theta, cache, coeffs, kink, g);
  return g;
}

FitResult fit_competitor(const CompetitorLoss& loss, const NetworkSpec& spec, const Dataset& data,
                         const TrainConfig& tc) {
  loss.validate();
  tc.validate();
  spec.validate();
  if (data.empty()) throw InvalidArgument("cannot fit on an empty dataset");
  data.validate();
  if (data.dim() != spec.input_dim)
    throw ShapeError(0, "dataset has " + std::to_string(data.dim()) + " features, network expects " +
                            std::to_string(spec.input_dim));
  if (loss.is_trimmed()) loss.kept(data.size(), data.size());

  auto objective = [&](const ParamVector& th) { return comp_loss(loss, residuals(spec, th, data)); };
  auto grad = [&](const ParamVector& th, std::span<const std::size_t> batch) {
    return comp_grad(loss, spec, th, data, batch, tc.kink);
  };

  FitResult res;
  res.sigma = std::numeric_limits<double>::quiet_NaN();
  ParamVector theta = glorot_init(spec, tc.seed);
  double prev = objective(theta);
  res.initial_loss = prev;
  const bool full_batch = tc.batch_size >= data.size();
  for (std::size_t k = 1; k <= tc.max_outer; ++k) {
    const std::uint64_t seed_k = outer_seed(tc.seed, k);
    ParamVector next = run_adam_epochs(theta, data.size(), tc.epochs, tc.batch_size, tc.adam, seed_k, grad);
    double current = objective(next);
    if (full_batch && tc.descent_guard) {
      AdamSettings retry = tc.adam;
      for (int attempt = 0; attempt < 8 && !(current <= prev); ++attempt) {
        retry.learning_rate *= 0.5;
        next = run_adam_epochs(theta, data.size(), tc.epochs, tc.batch_size, retry, seed_k, grad);
        current = objective(next);
      }
      if (!(current <= prev)) {
        next = theta;
        current = prev;
      }
    }
    if (!std::isfinite(current)) throw NumericError(loss.name() + " loss became non-finite at outer iteration " +
                                                    std::to_string(k));
    theta = std::move(next);
    res.loss_trace.push_back(current);
    res.sigma_trace.push_back(res.sigma);
    if (current > prev + 1e-12) ++res.descent_violations;
    const bool significant = current < prev - tc.tol;
    prev = current;
    if (!significant) break;
  }
  res.theta = std::move(theta);
  res.outer_iters = res.loss_trace.size();
  return res;
}

}  // namespace rrnet
