#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rrnet/adam.hpp"
#include "rrnet/dataset.hpp"
#include "rrnet/dpd_loss.hpp"
#include "rrnet/error.hpp"
#include "rrnet/network.hpp"

namespace rrnet {

enum class SigmaSolver { QuasiNewton, FixedPoint };

/// Optimizer settings for the alternating theta / sigma minimization.
struct TrainConfig {
  std::size_t epochs = 100;  // ADAM epochs per outer iteration
  std::size_t batch_size = 32;
  AdamSettings adam;
  SigmaSolver sigma_solver = SigmaSolver::QuasiNewton;
  double gtol = 1e-5;
  std::size_t max_sigma_iters = 15000;
  double tol = 1e-6;  // stop once an outer iteration reduces the loss by less than this
  std::size_t max_outer = 50;
  std::uint64_t seed = 0;
  KinkConvention kink = KinkConvention::Zero;
  // In full-batch mode, retry a theta update that raised the loss with a
  // halved step size (up to 8 times) and otherwise keep the old theta.
  bool descent_guard = true;

  void validate() const;
};

struct FitResult {
  ParamVector theta;
  double sigma = 0.0;  // NaN for losses that estimate no scale
  double initial_loss = 0.0;
  std::vector<double> loss_trace;  // one entry per completed outer iteration
  std::vector<double> sigma_trace;
  std::size_t outer_iters = 0;
  std::size_t descent_violations = 0;

  /// `outer,loss,sigma,descent_ok` with one row per outer iteration.
  std::string trace_csv() const;
};

/// Raised when the scale objective stops being finite.
class SigmaSolveError : public NumericError {
 public:
  SigmaSolveError(const std::string& what, double last_sigma) : NumericError(what), last_sigma_(last_sigma) {}
  double last_sigma() const noexcept { return last_sigma_; }

 private:
  double last_sigma_;
};

/// 1.4826 * median |r_i - median r|, floored at `floor`.
double mad_scale(const Eigen::VectorXd& residuals, double floor);
double init_sigma_mad(const NetworkSpec& spec, const ParamVector& theta0, const Dataset& data, double floor);

/// E epochs of mini-batch ADAM on the DPD loss with sigma held fixed.
ParamVector adam_theta_update(const DpdConfig& cfg, const NetworkSpec& spec, const ParamVector& theta, double sigma,
                              const Dataset& data, const TrainConfig& tc, std::uint64_t seed);

/// Bounded 1-D quasi-Newton (secant curvature, Armijo backtracking) on
/// sigma in [floor, inf). Stops when |dL/dsigma| < gtol.
double sigma_update_qn(const DpdConfig& cfg, const Eigen::VectorXd& residuals, double sigma_init, const TrainConfig& tc);
double sigma_update_qn(const DpdConfig& cfg, const NetworkSpec& spec, const ParamVector& theta, const Dataset& data,
                       double sigma_init, const TrainConfig& tc);

/// Gaussian-only weighted fixed point
///   sigma^2 <- sum w_i r_i^2 / (sum w_i - n beta / (1 + beta)^{3/2}),  w_i = exp(-beta r_i^2 / (2 sigma^2)),
/// the stationarity condition of the Gaussian DPD loss in sigma.
/// Falls back to the quasi-Newton solver if the denominator is not positive.
double sigma_update_fixed_point(const DpdConfig& cfg, const Eigen::VectorXd& residuals, double sigma_init,
                                const TrainConfig& tc = {});
double sigma_update_fixed_point(const DpdConfig& cfg, const NetworkSpec& spec, const ParamVector& theta,
                                const Dataset& data, double sigma_init, const TrainConfig& tc = {});

/// Glorot init, MAD scale init, then alternate theta and sigma updates.
FitResult fit(const DpdConfig& cfg, const NetworkSpec& spec, const Dataset& data, const TrainConfig& tc);

Eigen::VectorXd predict(const NetworkSpec& spec, const ParamVector& theta, const Eigen::MatrixXd& xs);

/// Seed for outer iteration k of a fit seeded with `seed`.
std::uint64_t outer_seed(std::uint64_t seed, std::size_t k);

}  // namespace rrnet
