#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rrnet/error_model.hpp"
#include "rrnet/network.hpp"

namespace rrnet {

/// Model distribution at which influence functions are evaluated: the true
/// parameters, the fixed design and the contaminated observation index.
struct IfSetup {
  NetworkSpec spec;
  ErrorModel model = ErrorModel::gaussian();
  ParamVector theta;
  double sigma = 1.0;
  Eigen::MatrixXd design;  // n x p
  double beta = 0.0;
  std::size_t index = 1;   // contaminated observation, 1-based
  double tau = 1e-10;      // relative truncation of the singular values of mu_dot^T mu_dot
  double sigma_floor = 1e-3;

  void validate() const;
};

struct IfCurve {
  std::vector<double> t;
  std::vector<Eigen::VectorXd> values;  // length 1 for scalar IFs
  double gross_error_sensitivity = 0.0;  // max over the grid of the Euclidean norm

  /// `t,component_index,value` (1-based components) for vector curves,
  /// `t,value` for scalar ones.
  std::string to_csv() const;
};

struct AdmissibleResult {
  bool admissible = false;
  double residual = 0.0;  // ||g - P g|| / ||g||
};

/// Influence functions at the model for the theta- and sigma-functionals
/// and the predictor. Network derivatives always use the Half kink
/// convention (the Heaviside limit of the softplus smoothing).
class InfluenceAnalyzer {
 public:
  explicit InfluenceAnalyzer(IfSetup setup);

  const IfSetup& setup() const { return setup_; }
  /// n x d matrix of stacked parameter gradients at the design points.
  const Eigen::MatrixXd& jacobian() const { return jac_; }
  std::size_t rank() const { return static_cast<std::size_t>(basis_.cols()); }
  double mu_i() const { return mu_i_; }

  Eigen::VectorXd if_theta(double t) const;
  double if_sigma(double t) const;
  double if_predictor(double t, std::span<const double> x) const;
  AdmissibleResult admissible_check(std::span<const double> x) const;

  /// Minimum-norm solution (mu_dot^T mu_dot)^+ v.
  Eigen::VectorXd apply_pinv(const Eigen::VectorXd& v) const;

  IfCurve theta_curve(std::span<const double> t_grid) const;
  IfCurve sigma_curve(std::span<const double> t_grid) const;
  IfCurve predictor_curve(std::span<const double> t_grid, std::span<const double> x) const;

 private:
  Eigen::VectorXd gradient_at(std::span<const double> x) const;

  IfSetup setup_;
  Eigen::MatrixXd jac_;
  Eigen::MatrixXd basis_;        // d x r right singular vectors kept
  Eigen::VectorXd inv_sq_sv_;    // 1 / s_k^2 for the kept singular values
  Eigen::VectorXd grad_i_;
  Eigen::VectorXd pinv_grad_i_;
  double mu_i_ = 0.0;
  double c02_ = 0.0;
  double c00_ = 0.0;
  double c_tilde_22_ = 0.0;
};

Eigen::MatrixXd design_row(std::span<const double> x);

struct ReluLimitReport {
  std::vector<double> m_values;
  std::vector<double> sup_gaps;  // vs. the direct Heaviside curve, per m: max of the three below
  std::vector<double> theta_gaps;
  std::vector<double> sigma_gaps;
  std::vector<double> predictor_gaps;
  // sup_gaps non-increasing. The theta part can rise while the smoothed
  // Jacobian still has a small extra singular value that the ReLU one lacks.
  bool monotone = false;
  IfCurve direct_theta;
  IfCurve direct_sigma;
  IfCurve direct_predictor;
  std::vector<IfCurve> smooth_theta;

  /// `m,sup_gap,theta_gap,sigma_gap,predictor_gap`
  std::string to_csv() const;
};

/// Evaluates the IFs on smooth_network(spec, m) for each m and directly on
/// the ReLU network with H(0) = 1/2; reports the sup gap over the t-grid of
/// all three IFs (predictor at `x`).
ReluLimitReport if_relu_limit(const IfSetup& setup, std::span<const double> t_grid, std::span<const double> x,
                              std::span<const double> m_sequence);

/// Figure presets: a 1-1-1 network with theta = (1, 1, 2, 1.5) in the
/// library layout, sigma = 0.1, n = 50 design points equispaced in [-10, 20].
IfSetup example_sigmoid_setup(double beta, std::size_t index);
IfSetup example_relu_setup(double beta, std::size_t index);

}  // namespace rrnet
