#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <vector>

#include "rrnet/error.hpp"
#include "rrnet/network.hpp"
#include "rrnet/rng.hpp"

using namespace rrnet;

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

ParamVector random_theta(const NetworkSpec& spec, Rng& rng, double scale = 1.0) {
  ParamVector t(static_cast<Eigen::Index>(spec.param_count()));
  for (Eigen::Index k = 0; k < t.size(); ++k) t[k] = rng.uniform(-scale, scale);
  return t;
}

ParamVector fd_gradient(const NetworkSpec& spec, const ParamVector& theta, const std::vector<double>& x,
                        double h = 1e-6) {
  ParamVector g(theta.size());
  for (Eigen::Index k = 0; k < theta.size(); ++k) {
    ParamVector a = theta, b = theta;
    a[k] += h;
    b[k] -= h;
    g[k] = (forward(spec, a, x) - forward(spec, b, x)) / (2.0 * h);
  }
  return g;
}

double rel_err(const Eigen::VectorXd& a, const Eigen::VectorXd& ref) {
  return (a - ref).norm() / std::max(ref.norm(), 1e-12);
}

}  // namespace

TEST_CASE("parameter count follows the layer formula") {
  CHECK(NetworkSpec::make(1, {}, Activation::identity()).param_count() == 2);
  CHECK(NetworkSpec::make(3, {}, Activation::identity()).param_count() == 4);
  CHECK(NetworkSpec::make(1, {5}, Activation::relu()).param_count() == 16);
  CHECK(NetworkSpec::make(1, {10}, Activation::sigmoid()).param_count() == 31);
  CHECK(NetworkSpec::make(1, {50, 50, 50, 50, 50}, Activation::relu()).param_count() == 10351);
  CHECK(NetworkSpec::make(2, {15}, Activation::sigmoid()).param_count() == 61);
  CHECK(NetworkSpec::make(2, {10}, Activation::relu()).param_count() == 41);
  CHECK(NetworkSpec::make(2, {30}, Activation::gelu()).param_count() == 121);
  // (7+1)*30 + 2*(31*30) + 31
  CHECK(NetworkSpec::make(7, {30, 30, 30}, Activation::relu()).param_count() == 2131);
}

TEST_CASE("forward: worked examples") {
  SUBCASE("linear identity network") {
    const auto spec = NetworkSpec::make(1, {}, Activation::identity());
    ParamVector t(2);
    t << 0.0, 1.0;
    const std::vector<double> x = {2.0};
    CHECK(forward(spec, t, x) == doctest::Approx(2.0));
  }
  SUBCASE("1-1-1 sigmoid network at x = 0") {
    const auto spec = NetworkSpec::make(1, {1}, Activation::sigmoid());
    ParamVector t(4);
    t << 1.0, 1.0, 2.0, 1.5;  // W1, b1, w0_out, w1_out
    const std::vector<double> x = {0.0};
    CHECK(forward(spec, t, x) == doctest::Approx(2.0 + 1.5 / (1.0 + std::exp(-1.0))).epsilon(1e-14));
  }
  SUBCASE("ReLU dead region") {
    const auto spec = NetworkSpec::make(1, {1}, Activation::relu());
    ParamVector t(4);
    t << 1.0, 1.0, 2.0, 1.5;
    const std::vector<double> x = {-5.0};
    CHECK(forward(spec, t, x) == 2.0);
  }
}

TEST_CASE("forward consumes exactly d parameters") {
  const auto spec = NetworkSpec::make(3, {4, 2}, Activation::tanh());
  ParamVector t = ParamVector::Zero(static_cast<Eigen::Index>(spec.param_count()));
  const std::vector<double> x = {1.0, 2.0, 3.0};
  CHECK_NOTHROW(forward(spec, t, x));

  ParamVector short_t = ParamVector::Zero(t.size() - 1);
  try {
    forward(spec, short_t, x);
    FAIL("expected a shape error");
  } catch (const ShapeError& e) {
    CHECK(e.layer() == 3);  // output block
  }
  ParamVector tiny = ParamVector::Zero(5);
  try {
    forward(spec, tiny, x);
    FAIL("expected a shape error");
  } catch (const ShapeError& e) {
    CHECK(e.layer() == 1);
  }
  ParamVector long_t = ParamVector::Zero(t.size() + 1);
  CHECK_THROWS_AS(forward(spec, long_t, x), ShapeError);
  const std::vector<double> bad_x = {1.0, 2.0};
  CHECK_THROWS_AS(forward(spec, t, bad_x), ShapeError);
}

TEST_CASE("grad_theta: 1-1-1 sigmoid network matches the closed form") {
  const auto spec = NetworkSpec::make(1, {1}, Activation::sigmoid());
  ParamVector t(4);
  // w_0 = 1 (bias), w_1 = 1, w0_out = 2, w1_out = 1.5 in library order (W1, b1, w0_out, w1_out)
  t << 1.0, 1.0, 2.0, 1.5;
  for (double xv : {-3.0, 0.0, 0.7, 4.0}) {
    const std::vector<double> x = {xv};
    const double a = 1.0 + 1.0 * xv;
    const double dphi = sigmoid(a) * (1.0 - sigmoid(a));
    const ParamVector g = grad_theta(spec, t, x);
    // Closed form in bias-first order (w_0, w_1, w0_out, w1_out)
    const double ref[4] = {1.5 * dphi, 1.5 * dphi * xv, 1.0, sigmoid(a)};
    CHECK(g[1] == doctest::Approx(ref[0]).epsilon(1e-14));  // b1 = w_0
    CHECK(g[0] == doctest::Approx(ref[1]).epsilon(1e-14));  // W1 = w_1
    CHECK(g[2] == doctest::Approx(ref[2]));
    CHECK(g[3] == doctest::Approx(ref[3]).epsilon(1e-14));
  }
}

TEST_CASE("grad_theta: ReLU kink conventions") {
  const auto spec = NetworkSpec::make(1, {1}, Activation::relu());
  ParamVector t(4);
  t << 1.0, 1.0, 2.0, 1.5;
  const std::vector<double> x = {-1.0};  // pre-activation exactly 0
  const ParamVector half = grad_theta(spec, t, x, KinkConvention::Half);
  const ParamVector zero = grad_theta(spec, t, x, KinkConvention::Zero);
  CHECK(half[1] == doctest::Approx(1.5 * 0.5));
  CHECK(half[0] == doctest::Approx(1.5 * 0.5 * -1.0));
  CHECK(zero[0] == 0.0);
  CHECK(zero[1] == 0.0);
  CHECK(half[2] == 1.0);
  CHECK(half[3] == 0.0);
}

TEST_CASE("grad_theta matches central finite differences for smooth activations") {
  Rng rng(20240611);
  const std::vector<Activation> acts = {Activation::sigmoid(), Activation::tanh(), Activation::gelu(),
                                        Activation::softplus(3.0), Activation::identity()};
  int instances = 0;
  for (int rep = 0; rep < 4; ++rep)
    for (const auto& act : acts) {
      const auto spec = NetworkSpec::make(3, {5, 4}, act);
      const ParamVector t = random_theta(spec, rng);
      const std::vector<double> x = {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
      CHECK(rel_err(grad_theta(spec, t, x), fd_gradient(spec, t, x)) < 1e-5);
      ++instances;
    }
  CHECK(instances == 20);
}

TEST_CASE("mixed per-layer activations and deep ReLU away from kinks") {
  Rng rng(7);
  NetworkSpec spec = NetworkSpec::make(2, {6, 5, 4}, Activation::relu());
  spec.activations[1] = Activation::tanh();
  for (int rep = 0; rep < 10; ++rep) {
    const ParamVector t = random_theta(spec, rng);
    const std::vector<double> x = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    CHECK(rel_err(grad_theta(spec, t, x), fd_gradient(spec, t, x, 1e-7)) < 1e-4);
  }
}

TEST_CASE("jacobian rows equal grad_theta; linear network rows are (1, x)") {
  const auto lin = NetworkSpec::make(2, {}, Activation::identity());
  Eigen::MatrixXd xs(3, 2);
  xs << 1, 2, 3, 4, -1, 0.5;
  ParamVector t(3);
  t << 0.3, -1.0, 2.0;
  const Eigen::MatrixXd j = jacobian(lin, t, xs, KinkConvention::Half);
  for (int i = 0; i < 3; ++i) {
    // linear layout: (w0_out, w_1, w_2)
    CHECK(j(i, 0) == 1.0);
    CHECK(j(i, 1) == xs(i, 0));
    CHECK(j(i, 2) == xs(i, 1));
  }
  Rng rng(3);
  const auto spec = NetworkSpec::make(2, {4}, Activation::gelu());
  const ParamVector th = random_theta(spec, rng);
  const Eigen::MatrixXd jj = jacobian(spec, th, xs, KinkConvention::Zero);
  for (int i = 0; i < 3; ++i) {
    const std::vector<double> x = {xs(i, 0), xs(i, 1)};
    CHECK((jj.row(i).transpose() - grad_theta(spec, th, x)).norm() < 1e-14);
  }
}

TEST_CASE("forward_batch agrees with forward") {
  Rng rng(11);
  const auto spec = NetworkSpec::make(2, {7, 3}, Activation::sigmoid());
  const ParamVector t = random_theta(spec, rng);
  Eigen::MatrixXd xs(5, 2);
  for (int i = 0; i < 5; ++i) xs.row(i) << rng.normal(), rng.normal();
  const Eigen::VectorXd out = forward_batch(spec, t, xs);
  for (int i = 0; i < 5; ++i) {
    const std::vector<double> x = {xs(i, 0), xs(i, 1)};
    CHECK(out[i] == doctest::Approx(forward(spec, t, x)).epsilon(1e-14));
  }
}

TEST_CASE("glorot_init bounds, zero biases, determinism") {
  const auto spec = NetworkSpec::make(4, {4}, Activation::tanh());
  const ParamVector a = glorot_init(spec, 42);
  const ParamVector b = glorot_init(spec, 42);
  CHECK(a == b);
  CHECK(a != glorot_init(spec, 43));
  const double bound = std::sqrt(6.0 / 8.0);
  for (int k = 0; k < 16; ++k) CHECK(std::abs(a[k]) <= bound);
  for (int k = 16; k < 20; ++k) CHECK(a[k] == 0.0);  // b1
  CHECK(a[20] == 0.0);                                // output bias
  // output weights: fan_in 4, fan_out 1
  for (int k = 21; k < 25; ++k) CHECK(std::abs(a[k]) <= std::sqrt(6.0 / 5.0));
}

TEST_CASE("smooth_network: softplus bound and uniform convergence") {
  const auto relu = NetworkSpec::make(1, {3}, Activation::relu());
  const auto s1 = smooth_network(relu, 1.0);
  CHECK(s1.activations[0].kind == ActivationKind::SoftplusM);
  CHECK(s1.activations[0].value(0.0) == doctest::Approx(std::log(2.0)));
  const auto sig = NetworkSpec::make(1, {3}, Activation::sigmoid());
  CHECK(smooth_network(sig, 10.0) == sig);

  for (double m : {1.0, 10.0, 100.0, 1000.0}) {
    const Activation sp = Activation::softplus(m);
    double sup = 0.0;
    for (int k = 0; k <= 2000; ++k) {
      const double z = -10.0 + 20.0 * k / 2000.0;
      sup = std::max(sup, std::abs(sp.value(z) - std::max(z, 0.0)));
    }
    CHECK(sup <= std::log(2.0) / m + 1e-15);
  }
  CHECK(Activation::softplus(2.0).value(800.0) == doctest::Approx(800.0));

  Rng rng(5);
  const auto spec = NetworkSpec::make(2, {5}, Activation::relu());
  double prev = INFINITY;
  for (double m : {1.0, 10.0, 100.0, 1000.0}) {
    const auto sm = smooth_network(spec, m);
    double gap = 0.0;
    Rng grid(99);
    for (int r = 0; r < 20; ++r) {
      const ParamVector t = random_theta(spec, grid);
      for (int k = 0; k < 10; ++k) {
        const std::vector<double> x = {grid.uniform(-1, 1), grid.uniform(-1, 1)};
        gap = std::max(gap, std::abs(forward(sm, t, x) - forward(spec, t, x)));
      }
    }
    CHECK(gap < prev);
    prev = gap;
  }
}

TEST_CASE("hidden-unit permutation leaves the output unchanged") {
  Rng rng(17);
  const auto spec = NetworkSpec::make(2, {4, 3}, Activation::tanh());
  const ParamVector t = random_theta(spec, rng);
  const std::vector<std::size_t> p1 = {2, 0, 3, 1};
  const std::vector<std::size_t> p2 = {1, 2, 0};
  const ParamVector t1 = permute_hidden_units(spec, t, 1, p1);
  const ParamVector t2 = permute_hidden_units(spec, t1, 2, p2);
  CHECK(t1 != t);
  for (int k = 0; k < 10; ++k) {
    const std::vector<double> x = {rng.normal(), rng.normal()};
    CHECK(forward(spec, t2, x) == doctest::Approx(forward(spec, t, x)).epsilon(1e-13));
  }
}

TEST_CASE("descriptor and checkpoint round-trip") {
  NetworkSpec spec = NetworkSpec::make(3, {5, 2}, Activation::relu());
  spec.activations[1] = Activation::softplus(12.5);
  CHECK(NetworkSpec::parse_descriptor(spec.descriptor()) == spec);
  const auto lin = NetworkSpec::make(2, {}, Activation::identity());
  CHECK(lin.descriptor() == "2;;identity");
  CHECK(NetworkSpec::parse_descriptor("2;;identity") == lin);
  CHECK(NetworkSpec::parse_descriptor("1;10;sigmoid").param_count() == 31);
  CHECK_THROWS_AS(NetworkSpec::parse_descriptor("1;10"), InvalidArgument);
  CHECK_THROWS_AS(NetworkSpec::parse_descriptor("1;10;swish"), InvalidArgument);

  Rng rng(1);
  const ParamVector t = random_theta(spec, rng, 3.0);
  const Checkpoint ck = checkpoint_from_string(checkpoint_to_string(spec, t));
  CHECK(ck.spec == spec);
  CHECK(ck.theta == t);  // 17 significant digits round-trip exactly

  const auto path = (std::filesystem::temp_directory_path() / "rrnet_ck_test.txt").string();
  save_checkpoint(path, spec, t);
  CHECK(load_checkpoint(path).theta == t);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_checkpoint("/nonexistent/dir/ck.txt"), IoError);

  std::string text = checkpoint_to_string(spec, t);
  text.replace(text.rfind('\n', text.size() - 2) + 1, 3, "abc");
  try {
    checkpoint_from_string(text, "ck");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.row() == spec.param_count() + 2);
  }
}
