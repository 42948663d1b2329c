#include "rrnet/influence.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "rrnet/error.hpp"
#include "rrnet/format.hpp"

namespace rrnet {

void IfSetup::validate() const {
  spec.validate();
  check_params(spec, theta);
  if (design.rows() == 0) throw InvalidArgument("influence setup needs at least one design point");
  if (static_cast<std::size_t>(design.cols()) != spec.input_dim)
    throw ShapeError(0, "design has " + std::to_string(design.cols()) + " columns, expected " +
                            std::to_string(spec.input_dim));
  if (index < 1 || index > static_cast<std::size_t>(design.rows()))
    throw InvalidArgument("contamination index must be in 1.." + std::to_string(design.rows()) + " (1-based), got " +
                          std::to_string(index));
  if (!(sigma >= sigma_floor) || !std::isfinite(sigma)) throw InvalidArgument("sigma must be finite and >= sigma floor");
  if (!(beta >= 0.0 && beta <= 1.0)) throw InvalidArgument("beta must lie in [0, 1]");
  if (!(tau > 0.0 && tau < 1.0)) throw InvalidArgument("pseudo-inverse tolerance must lie in (0, 1)");
}

std::string IfCurve::to_csv() const {
  const bool scalar = !values.empty() && values.front().size() == 1;
  std::string out = scalar ? "t,value\n" : "t,component_index,value\n";
  for (std::size_t k = 0; k < t.size(); ++k) {
    const std::string tk = format_double(t[k]);
    if (scalar) {
      out += tk + "," + format_double(values[k][0]) + "\n";
    } else {
      for (Eigen::Index c = 0; c < values[k].size(); ++c)
        out += tk + "," + std::to_string(c + 1) + "," + format_double(values[k][c]) + "\n";
    }
  }
  return out;
}

Eigen::MatrixXd design_row(std::span<const double> x) {
  Eigen::MatrixXd row(1, static_cast<Eigen::Index>(x.size()));
  for (std::size_t j = 0; j < x.size(); ++j) row(0, static_cast<Eigen::Index>(j)) = x[j];
  return row;
}

InfluenceAnalyzer::InfluenceAnalyzer(IfSetup setup) : setup_(std::move(setup)) {
  setup_.validate();
  jac_ = rrnet::jacobian(setup_.spec, setup_.theta, setup_.design, KinkConvention::Half);

  Eigen::BDCSVD<Eigen::MatrixXd> svd(jac_, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double smax = sv.size() ? sv[0] : 0.0;
  Eigen::Index keep = 0;
  while (keep < sv.size() && sv[keep] * sv[keep] > setup_.tau * smax * smax) ++keep;
  basis_ = svd.matrixV().leftCols(keep);
  inv_sq_sv_ = sv.head(keep).array().square().inverse();

  const auto i = static_cast<Eigen::Index>(setup_.index - 1);
  grad_i_ = jac_.row(i).transpose();
  pinv_grad_i_ = apply_pinv(grad_i_);
  std::vector<double> xi(setup_.spec.input_dim);
  for (std::size_t j = 0; j < xi.size(); ++j) xi[j] = setup_.design(i, static_cast<Eigen::Index>(j));
  mu_i_ = forward(setup_.spec, setup_.theta, xi);

  c00_ = setup_.model.c_constant(0, 0, setup_.beta);
  c02_ = setup_.model.c_constant(0, 2, setup_.beta);
  c_tilde_22_ = setup_.model.c_tilde_22(setup_.beta);
}

Eigen::VectorXd InfluenceAnalyzer::apply_pinv(const Eigen::VectorXd& v) const {
  return basis_ * (inv_sq_sv_.asDiagonal() * (basis_.transpose() * v));
}

Eigen::VectorXd InfluenceAnalyzer::gradient_at(std::span<const double> x) const {
  if (x.size() != setup_.spec.input_dim)
    throw ShapeError(0, "query point has " + std::to_string(x.size()) + " features, expected " +
                            std::to_string(setup_.spec.input_dim));
  return grad_theta(setup_.spec, setup_.theta, x, KinkConvention::Half);
}

Eigen::VectorXd InfluenceAnalyzer::if_theta(double t) const {
  const double s = (t - mu_i_) / setup_.sigma;
  return (-setup_.sigma / c02_ * setup_.model.psi1(setup_.beta, s)) * pinv_grad_i_;
}

double InfluenceAnalyzer::if_sigma(double t) const {
  if (!(c_tilde_22_ > 0.0)) throw NumericError("degenerate scale influence: C~_{2,2} <= 0");
  const double s = (t - mu_i_) / setup_.sigma;
  const double n = static_cast<double>(setup_.design.rows());
  const double b = setup_.beta;
  return -setup_.sigma / (n * c_tilde_22_) * (setup_.model.psi2(b, s) - b * c00_ / (1.0 + b));
}

double InfluenceAnalyzer::if_predictor(double t, std::span<const double> x) const {
  const double s = (t - mu_i_) / setup_.sigma;
  const double h = gradient_at(x).dot(pinv_grad_i_);
  return -setup_.sigma / c02_ * setup_.model.psi1(setup_.beta, s) * h;
}

AdmissibleResult InfluenceAnalyzer::admissible_check(std::span<const double> x) const {
  const Eigen::VectorXd g = gradient_at(x);
  const double norm = g.norm();
  AdmissibleResult res;
  if (norm == 0.0) {
    res.admissible = true;
    return res;
  }
  const Eigen::VectorXd proj = basis_ * (basis_.transpose() * g);
  res.residual = (g - proj).norm() / norm;
  res.admissible = res.residual < 1e-8;
  return res;
}

namespace {

IfCurve make_curve(std::span<const double> grid, const std::function<Eigen::VectorXd(double)>& eval) {
  for (std::size_t k = 1; k < grid.size(); ++k)
    if (!(grid[k] > grid[k - 1])) throw InvalidArgument("t-grid must be strictly increasing");
  IfCurve c;
  c.t.assign(grid.begin(), grid.end());
  c.values.reserve(grid.size());
  for (double t : grid) {
    Eigen::VectorXd v = eval(t);
    if (!v.allFinite()) throw NumericError("influence function is not finite at t = " + format_double(t));
    c.gross_error_sensitivity = std::max(c.gross_error_sensitivity, v.norm());
    c.values.push_back(std::move(v));
  }
  return c;
}

}  // namespace

IfCurve InfluenceAnalyzer::theta_curve(std::span<const double> t_grid) const {
  return make_curve(t_grid, [this](double t) { return if_theta(t); });
}

IfCurve InfluenceAnalyzer::sigma_curve(std::span<const double> t_grid) const {
  return make_curve(t_grid, [this](double t) { return Eigen::VectorXd::Constant(1, if_sigma(t)); });
}

IfCurve InfluenceAnalyzer::predictor_curve(std::span<const double> t_grid, std::span<const double> x) const {
  const double h = gradient_at(x).dot(pinv_grad_i_);
  return make_curve(t_grid, [this, h](double t) {
    const double s = (t - mu_i_) / setup_.sigma;
    return Eigen::VectorXd::Constant(1, -setup_.sigma / c02_ * setup_.model.psi1(setup_.beta, s) * h);
  });
}

std::string ReluLimitReport::to_csv() const {
  std::string out = "m,sup_gap,theta_gap,sigma_gap,predictor_gap\n";
  for (std::size_t k = 0; k < m_values.size(); ++k)
    out += format_double(m_values[k]) + "," + format_double(sup_gaps[k]) + "," + format_double(theta_gaps[k]) + "," +
           format_double(sigma_gaps[k]) + "," + format_double(predictor_gaps[k]) + "\n";
  return out;
}

ReluLimitReport if_relu_limit(const IfSetup& setup, std::span<const double> t_grid, std::span<const double> x,
                              std::span<const double> m_sequence) {
  if (!setup.spec.has_relu()) throw InvalidArgument("ReLU smoothing limit needs a network with a ReLU layer");
  for (std::size_t k = 1; k < m_sequence.size(); ++k)
    if (!(m_sequence[k] > m_sequence[k - 1])) throw InvalidArgument("smoothing sequence must be increasing");

  ReluLimitReport rep;
  const InfluenceAnalyzer direct(setup);
  rep.direct_theta = direct.theta_curve(t_grid);
  rep.direct_sigma = direct.sigma_curve(t_grid);
  rep.direct_predictor = direct.predictor_curve(t_grid, x);

  for (double m : m_sequence) {
    IfSetup smooth = setup;
    smooth.spec = smooth_network(setup.spec, m);
    const InfluenceAnalyzer an(smooth);
    IfCurve th = an.theta_curve(t_grid);
    IfCurve sg = an.sigma_curve(t_grid);
    IfCurve pr = an.predictor_curve(t_grid, x);
    double gt = 0.0, gs = 0.0, gp = 0.0;
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
      gt = std::max(gt, (th.values[k] - rep.direct_theta.values[k]).cwiseAbs().maxCoeff());
      gs = std::max(gs, std::abs(sg.values[k][0] - rep.direct_sigma.values[k][0]));
      gp = std::max(gp, std::abs(pr.values[k][0] - rep.direct_predictor.values[k][0]));
    }
    rep.m_values.push_back(m);
    rep.sup_gaps.push_back(std::max({gt, gs, gp}));
    rep.theta_gaps.push_back(gt);
    rep.sigma_gaps.push_back(gs);
    rep.predictor_gaps.push_back(gp);
    rep.smooth_theta.push_back(std::move(th));
  }
  rep.monotone = true;
  for (std::size_t k = 1; k < rep.sup_gaps.size(); ++k)
    if (!(rep.sup_gaps[k] <= rep.sup_gaps[k - 1])) rep.monotone = false;
  return rep;
}

namespace {

IfSetup example_setup(Activation act, double beta, std::size_t index) {
  IfSetup s;
  s.spec = NetworkSpec::make(1, {1}, act);
  s.model = ErrorModel::gaussian();
  s.theta.resize(4);
  // (W_1, b_1, w0_out, w1_out) = (w_1, w_0, w_0^out, w_1^out)
  s.theta << 1.0, 1.0, 2.0, 1.5;
  s.sigma = 0.1;
  s.design.resize(50, 1);
  for (int k = 0; k < 50; ++k) s.design(k, 0) = -10.0 + 30.0 * k / 49.0;
  s.beta = beta;
  s.index = index;
  return s;
}

}  // namespace

IfSetup example_sigmoid_setup(double beta, std::size_t index) {
  return example_setup(Activation::sigmoid(), beta, index);
}

IfSetup example_relu_setup(double beta, std::size_t index) {
  return example_setup(Activation::relu(), beta, index);
}

}  // namespace rrnet
