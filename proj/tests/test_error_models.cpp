#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rrnet/error.hpp"
#include "rrnet/error_model.hpp"
#include "rrnet/quadrature.hpp"

using namespace rrnet;

namespace {
const double kPi = std::numbers::pi;
const ErrorModel kModels[] = {ErrorModel::gaussian(), ErrorModel::laplace(), ErrorModel::logistic()};

double moment(const ErrorModel& m, int k) {
  const double bp[] = {0.0};
  return integrate_adaptive([&](double s) { return std::pow(s, k) * m.density(s); }, -60.0, 60.0, 1e-13, bp).value;
}
}  // namespace

TEST_CASE("densities at zero") {
  CHECK(ErrorModel::gaussian().density(0.0) == doctest::Approx(1.0 / std::sqrt(2 * kPi)).epsilon(1e-14));
  CHECK(ErrorModel::laplace().density(0.0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(ErrorModel::logistic().density(0.0) == doctest::Approx(kPi / (4 * std::sqrt(3.0))).epsilon(1e-14));
  for (const auto& m : kModels)
    for (double s : {-3.0, -0.2, 0.0, 1.7})
      CHECK(m.density(s) == doctest::Approx(std::exp(m.log_density(s))).epsilon(1e-14));
}

TEST_CASE("standardization: unit mass, zero mean, unit variance") {
  for (const auto& m : kModels) {
    CHECK(std::abs(moment(m, 0) - 1.0) < 1e-8);
    CHECK(std::abs(moment(m, 1)) < 1e-8);
    CHECK(std::abs(moment(m, 2) - 1.0) < 1e-8);
  }
}

TEST_CASE("scores") {
  CHECK(ErrorModel::gaussian().score(3.0) == -3.0);
  CHECK(ErrorModel::laplace().score(0.0) == 0.0);
  CHECK(ErrorModel::laplace().score(0.5) == doctest::Approx(-std::sqrt(2.0)));
  const auto lg = ErrorModel::logistic();
  double prev = INFINITY;
  for (int k = 0; k <= 4000; ++k) {
    const double u = lg.score(-20.0 + 40.0 * k / 4000.0);
    CHECK(u <= prev);
    prev = u;
  }
  // score is d/ds log f
  for (const auto& m : {ErrorModel::gaussian(), ErrorModel::logistic()})
    for (double s : {-2.0, 0.3, 1.5}) {
      const double h = 1e-6;
      CHECK(m.score(s) == doctest::Approx((m.log_density(s + h) - m.log_density(s - h)) / (2 * h)).epsilon(1e-7));
    }
}

TEST_CASE("psi functions") {
  const auto g = ErrorModel::gaussian();
  for (double beta : {0.0, 0.3, 1.0})
    for (double s : {-2.0, 0.0, 0.7, 3.0})
      CHECK(g.psi1(beta, s) ==
            doctest::Approx(-std::pow(2 * kPi, -beta / 2) * s * std::exp(-beta * s * s / 2)).epsilon(1e-13));
  CHECK(g.psi1(1.0, 1.0) == doctest::Approx(-0.24197).epsilon(1e-4));
  for (const auto& m : kModels) CHECK(m.psi2(0.0, 0.0) == 1.0);

  // redescending for beta > 0, unbounded for beta = 0
  for (const auto& m : kModels) {
    double max1 = 0.0, max2 = 0.0;
    for (int k = 0; k <= 20000; ++k) {
      const double s = -100.0 + 200.0 * k / 20000.0;
      max1 = std::max(max1, std::abs(m.psi1(0.5, s)));
      max2 = std::max(max2, std::abs(m.psi2(0.5, s)));
    }
    CHECK(std::isfinite(max1));
    CHECK(std::abs(m.psi1(0.5, 100.0)) < 1e-6 * max1);
    CHECK(std::abs(m.psi1(0.5, -100.0)) < 1e-6 * max1);
    CHECK(std::abs(m.psi2(0.5, 100.0)) < 1e-6 * max2);
  }
  CHECK(std::abs(g.psi1(0.0, 100.0)) == doctest::Approx(100.0));
  CHECK(std::abs(g.psi1(0.0, 1e6)) == doctest::Approx(1e6));
}

TEST_CASE("C constants: Gaussian closed forms") {
  const auto g = ErrorModel::gaussian();
  CHECK(g.c_constant(0, 0, 1.0) == doctest::Approx(std::pow(2 * kPi, -0.5) * std::pow(2.0, -0.5)).epsilon(1e-14));
  CHECK(g.c_constant(0, 0, 1.0) == doctest::Approx(0.28209).epsilon(1e-4));
  for (double beta : {0.1, 0.3, 0.5, 0.7, 1.0}) {
    const double c00 = std::pow(2 * kPi, -beta / 2) / std::sqrt(1 + beta);
    CHECK(g.c_constant(0, 0, beta) == doctest::Approx(c00).epsilon(1e-14));
    CHECK(g.c_constant(0, 2, beta) == doctest::Approx(c00 / (1 + beta)).epsilon(1e-14));
    CHECK(g.c_constant(2, 2, beta) == doctest::Approx(3 * c00 / ((1 + beta) * (1 + beta))).epsilon(1e-14));
    CHECK(g.c_constant(1, 2, beta) == 0.0);
    for (auto [i, j] : {std::pair{0, 0}, {0, 2}, {2, 2}, {1, 2}})
      CHECK(std::abs(g.c_constant(i, j, beta) - g.c_constant_quadrature(i, j, beta)) < 1e-8);
  }
}

TEST_CASE("C constants: beta = 0 mass and identities for every model") {
  for (const auto& m : kModels) {
    CAPTURE(m.name());
    CHECK(m.c_constant(0, 0, 0.0) == doctest::Approx(1.0).epsilon(1e-10));
    for (double beta : {0.1, 0.5, 1.0}) {
      for (int i = 1; i <= 3; ++i)
        CHECK(std::abs(m.c_constant(i, 1, beta) + i / (1 + beta) * m.c_constant(i - 1, 0, beta)) < 1e-8);
      for (auto [i, j] : {std::pair{1, 0}, {0, 1}, {1, 2}, {2, 1}, {3, 0}, {3, 2}})
        CHECK(std::abs(m.c_constant(i, j, beta)) < 1e-10);
    }
  }
}

TEST_CASE("c_tilde_22 at beta = 0 is 2 for the Gaussian") {
  CHECK(ErrorModel::gaussian().c_tilde_22(0.0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("model names parse") {
  for (const auto& m : kModels) CHECK(ErrorModel::parse(m.name()) == m);
  CHECK_THROWS_AS(ErrorModel::parse("cauchy"), InvalidArgument);
}
