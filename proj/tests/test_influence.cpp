#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "rrnet/error.hpp"
#include "rrnet/influence.hpp"
#include "test_support.hpp"

using namespace rrnet;
using namespace testing_support;

namespace {
double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::vector<double> grid(double lo, double hi, int count) {
  std::vector<double> t(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) t[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (count - 1);
  return t;
}

}  // namespace

TEST_CASE("Jacobian of the sigmoid preset matches the closed-form gradient") {
  const IfSetup s = example_sigmoid_setup(0.5, 2);
  CHECK(s.design.rows() == 50);
  CHECK(s.design(0, 0) == -10.0);
  CHECK(s.design(49, 0) == doctest::Approx(20.0));
  CHECK(s.sigma == 0.1);
  const InfluenceAnalyzer a(s);
  for (Eigen::Index i = 0; i < 50; ++i) {
    const double x = s.design(i, 0);
    const double ph = sigmoid(1.0 + x);
    // library order (W1, b1, w0_out, w1_out)
    CHECK(a.jacobian()(i, 0) == doctest::Approx(1.5 * ph * (1 - ph) * x).epsilon(1e-13));
    CHECK(a.jacobian()(i, 1) == doctest::Approx(1.5 * ph * (1 - ph)).epsilon(1e-13));
    CHECK(a.jacobian()(i, 2) == 1.0);
    CHECK(a.jacobian()(i, 3) == doctest::Approx(ph).epsilon(1e-13));
  }
}

TEST_CASE("Jacobian: linear rows and dead ReLU units") {
  IfSetup s;
  s.spec = NetworkSpec::make(2, {}, Activation::identity());
  s.theta = ParamVector::Ones(3);
  s.design.resize(4, 2);
  s.design << 1, 2, 3, -1, 0, 0.5, 2, 2;
  const InfluenceAnalyzer a(s);
  for (int i = 0; i < 4; ++i) {
    CHECK(a.jacobian()(i, 0) == 1.0);
    CHECK(a.jacobian()(i, 1) == s.design(i, 0));
    CHECK(a.jacobian()(i, 2) == s.design(i, 1));
  }

  IfSetup r;
  r.spec = NetworkSpec::make(1, {2}, Activation::relu());
  r.theta.resize(7);
  r.theta << 1.0, 1.0, 0.5, -100.0, 0.0, 2.0, 3.0;  // unit 2 has pre-activation x - 100 < 0 on the design
  r.design = Eigen::VectorXd::LinSpaced(5, -1.0, 1.0);
  const InfluenceAnalyzer b(r);
  CHECK(b.jacobian().col(1).cwiseAbs().maxCoeff() == 0.0);  // W1 row 2
  CHECK(b.jacobian().col(3).cwiseAbs().maxCoeff() == 0.0);  // b1 entry 2
  CHECK(b.jacobian().col(6).cwiseAbs().maxCoeff() == 0.0);  // output weight of unit 2
}

TEST_CASE("theta IF") {
  const IfSetup s0 = example_sigmoid_setup(0.0, 7);
  const InfluenceAnalyzer a0(s0);
  const double mu = a0.mu_i();
  CHECK(a0.if_theta(mu).norm() == 0.0);
  const Eigen::VectorXd v1 = a0.if_theta(mu + 0.3);
  const Eigen::VectorXd v2 = a0.if_theta(mu + 0.6);
  CHECK(rel_err(v2, 2.0 * v1) < 1e-12);  // linear in t at beta = 0

  const InfluenceAnalyzer a5(example_sigmoid_setup(0.5, 7));
  const auto ts = grid(mu - 2, mu + 2, 401);
  const IfCurve c = a5.theta_curve(ts);
  CHECK(std::isfinite(c.gross_error_sensitivity));
  CHECK(a5.if_theta(mu + 1.0).norm() < 1e-3 * c.gross_error_sensitivity);
  CHECK(a5.if_theta(mu - 1.0).norm() < 1e-3 * c.gross_error_sensitivity);

  // minimum-norm solution lies in the row space of the Jacobian
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a5.jacobian(), Eigen::ComputeThinV);
  const double smax = svd.singularValues()[0];
  int rank = 0;
  for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k)
    if (svd.singularValues()[k] > 1e-10 * smax) ++rank;
  const Eigen::MatrixXd v = svd.matrixV().leftCols(rank);
  const Eigen::VectorXd g = a5.if_theta(mu + 0.05);
  CHECK((g - v * (v.transpose() * g)).norm() < 1e-10 * g.norm());
}

TEST_CASE("sigma IF") {
  const IfSetup s0 = example_sigmoid_setup(0.0, 3);
  const InfluenceAnalyzer a0(s0);
  const double mu = a0.mu_i(), sg = s0.sigma;
  CHECK(a0.if_sigma(mu) == doctest::Approx(-sg / (2.0 * 50)).epsilon(1e-10));
  // grows like (t - mu)^2 at beta = 0
  const double q1 = a0.if_sigma(mu + 100 * sg) - a0.if_sigma(mu);
  const double q2 = a0.if_sigma(mu + 200 * sg) - a0.if_sigma(mu);
  CHECK(q2 / q1 == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(std::abs(a0.if_sigma(mu + 1000 * sg)) > 1e4 * std::abs(a0.if_sigma(mu + sg)));

  const InfluenceAnalyzer a5(example_sigmoid_setup(0.5, 3));
  const auto ts = grid(mu - 1e3, mu + 1e3, 2001);
  const IfCurve c = a5.sigma_curve(ts);
  CHECK(std::isfinite(c.gross_error_sensitivity));
  CHECK(c.to_csv().rfind("t,value\n", 0) == 0);
}

TEST_CASE("predictor IF") {
  const IfSetup s = example_sigmoid_setup(0.5, 10);
  const InfluenceAnalyzer a(s);
  const double mu = a.mu_i();
  const std::vector<double> xi = {s.design(9, 0)};
  CHECK(a.if_predictor(mu, xi) == 0.0);
  for (Eigen::Index j : {0, 9, 30}) {
    const std::vector<double> x = {s.design(j, 0)};
    const Eigen::VectorXd g = grad_theta(s.spec, s.theta, x, KinkConvention::Half);
    for (double t : {mu - 0.2, mu + 0.05, mu + 0.3})
      CHECK(std::abs(a.if_predictor(t, x) - g.dot(a.if_theta(t))) < 1e-10);
  }
  const auto ts = grid(mu - 1e4, mu + 1e4, 4001);
  CHECK(std::isfinite(a.predictor_curve(ts, xi).gross_error_sensitivity));
}

TEST_CASE("IF values scale with sigma") {
  IfSetup s = example_sigmoid_setup(0.5, 4);
  const InfluenceAnalyzer a(s);
  s.sigma *= 2;
  const InfluenceAnalyzer b(s);
  const double mu = a.mu_i();
  const std::vector<double> x = {0.3};
  CHECK(rel_err(b.if_theta(mu + 2 * 0.07), 2.0 * a.if_theta(mu + 0.07)) < 1e-12);
  CHECK(b.if_sigma(mu + 2 * 0.07) == doctest::Approx(2 * a.if_sigma(mu + 0.07)).epsilon(1e-12));
  CHECK(b.if_predictor(mu + 2 * 0.07, x) == doctest::Approx(2 * a.if_predictor(mu + 0.07, x)).epsilon(1e-12));
}

TEST_CASE("admissible feature domain") {
  const IfSetup s = example_sigmoid_setup(0.5, 1);
  const InfluenceAnalyzer a(s);
  const std::vector<double> x1 = {s.design(0, 0)};
  const auto r1 = a.admissible_check(x1);
  CHECK(r1.admissible);
  CHECK(r1.residual < 1e-12);

  IfSetup lin;
  lin.spec = NetworkSpec::make(2, {}, Activation::identity());
  lin.theta = ParamVector::Ones(3);
  Rng rng(4);
  lin.design.resize(6, 2);
  for (Eigen::Index i = 0; i < 6; ++i) lin.design.row(i) << rng.normal(), rng.normal();
  const InfluenceAnalyzer al(lin);
  for (int k = 0; k < 5; ++k) {
    const std::vector<double> x = {10 * rng.normal(), 10 * rng.normal()};
    CHECK(al.admissible_check(x).admissible);
  }

  IfSetup deep;
  deep.spec = NetworkSpec::make(1, {6}, Activation::tanh());
  deep.theta = random_theta(deep.spec, rng);
  deep.design = Eigen::VectorXd::LinSpaced(3, -0.5, 0.5);
  const InfluenceAnalyzer ad(deep);
  const std::vector<double> far = {7.0};
  const auto rf = ad.admissible_check(far);
  CHECK_FALSE(rf.admissible);
  CHECK(rf.residual > 1e-8);
}

TEST_CASE("ReLU smoothing limit") {
  const IfSetup s = example_relu_setup(0.5, 2);
  const InfluenceAnalyzer a(s);
  const double mu = a.mu_i();
  CHECK(min_abs_preactivation(s.spec, s.theta, s.design) > 1e-3);
  const auto ts = grid(mu - 1, mu + 1, 201);
  const std::vector<double> x = {s.design(1, 0)};
  const std::vector<double> ms = {1, 10, 100, 1000};
  const ReluLimitReport rep = if_relu_limit(s, ts, x, ms);
  REQUIRE(rep.sup_gaps.size() == 4);
  REQUIRE(rep.predictor_gaps.size() == 4);
  for (std::size_t k = 1; k < 4; ++k) {
    CHECK(rep.predictor_gaps[k] <= rep.predictor_gaps[k - 1]);
    CHECK(rep.sigma_gaps[k] <= rep.sigma_gaps[k - 1] + 1e-12);
  }
  // theta gap overshoots while the smoothed Jacobian keeps a fourth direction
  for (std::size_t k = 2; k < 4; ++k) CHECK(rep.sup_gaps[k] <= rep.sup_gaps[k - 1]);
  CHECK(rep.monotone == std::is_sorted(rep.sup_gaps.rbegin(), rep.sup_gaps.rend()));
  CHECK(rep.sup_gaps[3] < 1e-4);
  CHECK(std::isfinite(rep.direct_theta.gross_error_sensitivity));
  CHECK(rep.to_csv().rfind("m,sup_gap,theta_gap,sigma_gap,predictor_gap\n", 0) == 0);

  const std::vector<double> bad = {10, 1};
  CHECK_THROWS_AS(if_relu_limit(s, ts, x, bad), InvalidArgument);
  CHECK_THROWS_AS(if_relu_limit(example_sigmoid_setup(0.5, 2), ts, x, ms), InvalidArgument);
}

TEST_CASE("setup validation") {
  CHECK_THROWS_AS(InfluenceAnalyzer(example_sigmoid_setup(0.5, 0)), InvalidArgument);
  CHECK_THROWS_AS(InfluenceAnalyzer(example_sigmoid_setup(0.5, 51)), InvalidArgument);
  CHECK_THROWS_AS(InfluenceAnalyzer(example_sigmoid_setup(1.5, 1)), InvalidArgument);
}
