#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rrnet/dataset.hpp"
#include "rrnet/error_model.hpp"
#include "rrnet/network.hpp"

namespace rrnet {

/// Tuning parameter beta in [0, 1], scale floor sigma0 and the error model.
struct DpdConfig {
  double beta = 0.0;
  double sigma_floor = 1e-3;
  ErrorModel model = ErrorModel::gaussian();

  void validate() const;
};

/// Per-observation DPD loss V_beta for a residual r = y - mu(x, theta).
/// beta = 0 is the negative log-likelihood branch, evaluated directly.
double v_beta(const DpdConfig& cfg, double residual, double sigma);
double v_beta(const DpdConfig& cfg, const NetworkSpec& spec, const ParamVector& theta, double sigma, double y,
              std::span<const double> x);

/// Mean of V_beta over residuals, summed in index order.
double loss_from_residuals(const DpdConfig& cfg, const Eigen::VectorXd& residuals, double sigma);
/// d/dsigma of `loss_from_residuals`.
double grad_sigma_from_residuals(const DpdConfig& cfg, const Eigen::VectorXd& residuals, double sigma);

Eigen::VectorXd residuals(const NetworkSpec& spec, const ParamVector& theta, const Dataset& data);

/// L_{n,beta}(theta, sigma | data). Throws on an empty dataset.
double loss(const DpdConfig& cfg, const NetworkSpec& spec, const ParamVector& theta, double sigma, const Dataset& data);

/// Subgradient in theta over the observations in `batch` (all rows if empty):
///   (1 + beta) / (|B| sigma^{1+beta}) sum_{i in B} psi1(r_i / sigma) d mu(x_i) / d theta
ParamVector grad_theta_loss(const DpdConfig& cfg, const NetworkSpec& spec, const ParamVector& theta, double sigma,
                            const Dataset& data, std::span<const std::size_t> batch = {},
                            KinkConvention kink = KinkConvention::Zero);

double grad_sigma_loss(const DpdConfig& cfg, const NetworkSpec& spec, const ParamVector& theta, double sigma,
                       const Dataset& data);

/// Columns of `data.x` for the rows in `batch`, as a p x |B| matrix.
Eigen::MatrixXd gather_columns(const Dataset& data, std::span<const std::size_t> batch);

}  // namespace rrnet
