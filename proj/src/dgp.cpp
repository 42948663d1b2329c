#include "rrnet/dgp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "rrnet/error.hpp"
#include "rrnet/rng.hpp"

namespace rrnet {

namespace {

constexpr std::uint64_t kTrainStream = 0x747261696e;  // "train"
constexpr std::uint64_t kTestStream = 0x74657374;     // "test"
constexpr std::uint64_t kContamStream = 0x636f6e74;   // "cont"

struct Contamination {
  double mean;
  double sd;
};

Contamination contamination_law(int id) {
  switch (id) {
    case 1:
    case 3:
      return {2.0, 1.0};
    case 2:
    case 4:
      return {2.0, 2.0};
    case 5:
      return {0.0, 2.0};
    case 6:
      return {10.0, std::sqrt(10.0)};
    case 7:
      return {5.0, 5.0};
    default:
      throw InvalidArgument("function id must be in 1..7, got " + std::to_string(id));
  }
}

void check_id(int id) {
  if (id < 1 || id > 7) throw InvalidArgument("function id must be in 1..7, got " + std::to_string(id));
}

void check_unit(double v, int id) {
  if (!(v >= 0.0 && v <= 1.0))
    throw InvalidArgument("phi" + std::to_string(id) + " is defined on [0, 1], got x = " + std::to_string(v));
}

double grid_point(double lo, double hi, std::size_t k, std::size_t n) {
  if (n == 1) return 0.5 * (lo + hi);
  return lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
}

// Covariates for one sample. Grid designs ignore the generator.
Eigen::MatrixXd covariates(const DgpSpec& d, Rng& rng) {
  const auto n = static_cast<Eigen::Index>(d.n);
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(d.input_dim()));
  switch (d.function_id) {
    case 1:
      for (Eigen::Index i = 0; i < n; ++i) x(i, 0) = grid_point(-2.0, 2.0, static_cast<std::size_t>(i), d.n);
      break;
    case 2:
      for (Eigen::Index i = 0; i < n; ++i) x(i, 0) = grid_point(-7.5, 7.5, static_cast<std::size_t>(i), d.n);
      break;
    case 3:
      for (Eigen::Index i = 0; i < n; ++i) x(i, 0) = rng.uniform();
      break;
    case 4: {
      const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(d.n))));
      for (std::size_t a = 0; a < side; ++a)
        for (std::size_t b = 0; b < side; ++b) {
          const auto i = static_cast<Eigen::Index>(a * side + b);
          x(i, 0) = grid_point(-2.0, 2.0, a, side);
          x(i, 1) = grid_point(-2.0, 2.0, b, side);
        }
      break;
    }
    case 5:
      for (Eigen::Index i = 0; i < n; ++i) {
        const double z = grid_point(0.0, std::numbers::pi, static_cast<std::size_t>(i), d.n);
        x(i, 0) = std::sin(z);
        x(i, 1) = std::cos(z);
      }
      break;
    case 6:
      for (Eigen::Index i = 0; i < n; ++i) {
        x(i, 0) = rng.uniform(-1.0, 1.0);
        x(i, 1) = rng.uniform(-1.0, 1.0);
      }
      break;
    case 7:
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < 7; ++j) x(i, j) = rng.uniform();
      break;
    default:
      check_id(d.function_id);
  }
  return x;
}

// phi5 values come from the z-grid directly rather than through atan2.
double target(const DgpSpec& d, const Eigen::MatrixXd& x, Eigen::Index i) {
  if (d.function_id == 5) return grid_point(0.0, std::numbers::pi, static_cast<std::size_t>(i), d.n);
  std::vector<double> row(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index j = 0; j < x.cols(); ++j) row[static_cast<std::size_t>(j)] = x(i, j);
  return eval_phi(d.function_id, row);
}

Dataset clean_sample(const DgpSpec& d, Rng& rng) {
  Dataset out;
  out.x = covariates(d, rng);
  out.y.resize(static_cast<Eigen::Index>(d.n));
  out.contaminated.assign(d.n, false);
  for (Eigen::Index i = 0; i < out.x.rows(); ++i) out.y[i] = target(d, out.x, i) + rng.normal(0.0, d.sigma);
  return out;
}

}  // namespace

DgpSpec DgpSpec::defaults(int function_id, double delta, std::uint64_t seed) {
  check_id(function_id);
  static constexpr std::size_t kN[] = {401, 151, 800, 256, 100, 200, 200};
  static constexpr double kSigma[] = {0.1, 0.1, 0.1, 0.1, 0.01, 0.05, 1.0};
  DgpSpec d;
  d.function_id = function_id;
  d.n = kN[function_id - 1];
  d.sigma = kSigma[function_id - 1];
  d.delta = delta;
  d.seed = seed;
  return d;
}

std::size_t DgpSpec::input_dim() const {
  switch (function_id) {
    case 1:
    case 2:
    case 3:
      return 1;
    case 4:
    case 5:
    case 6:
      return 2;
    case 7:
      return 7;
    default:
      check_id(function_id);
  }
  return 0;
}

void DgpSpec::validate() const {
  check_id(function_id);
  if (n == 0) throw InvalidArgument("sample size must be positive");
  if (function_id == 4) {
    const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
    if (side * side != n) throw InvalidArgument("phi4 uses a square grid; n must be a perfect square");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("error scale must be positive and finite");
  if (!(delta >= 0.0 && delta < 0.5)) throw InvalidArgument("contamination fraction must lie in [0, 0.5)");
}

double eval_phi(int id, std::span<const double> x) {
  check_id(id);
  const std::size_t need = id <= 3 ? 1 : (id == 7 ? 7 : 2);
  if (x.size() != need)
    throw InvalidArgument("phi" + std::to_string(id) + " takes " + std::to_string(need) + " inputs, got " +
                          std::to_string(x.size()));
  switch (id) {
    case 1:
      return std::cbrt(x[0] * x[0]);
    case 2:
      return x[0] == 0.0 ? 1.0 : std::sin(x[0]) / x[0];
    case 3:
      check_unit(x[0], id);
      return std::sqrt(x[0] * (1.0 - x[0])) * std::sin(2.2 * std::numbers::pi / (x[0] + 0.15));
    case 4:
      return x[0] * std::exp(-(x[0] * x[0] + x[1] * x[1]));
    case 5: {
      const double r = std::hypot(x[0], x[1]);
      if (std::abs(r - 1.0) > 1e-9) throw InvalidArgument("phi5 is defined on the unit circle");
      return std::atan2(x[0], x[1]);
    }
    case 6: {
      static constexpr double m[3][2] = {{0.0, 0.75}, {0.5, -0.5}, {-0.75, 0.0}};
      static constexpr double alpha[3] = {1.0, 2.0, 2.0};
      double s = 0.0;
      for (int l = 0; l < 3; ++l) {
        const double a = x[0] - m[l][0], b = x[1] - m[l][1];
        s += std::exp(-alpha[l] * (a * a + b * b));
      }
      return s;
    }
    case 7:
      for (double v : x) check_unit(v, id);
      return x[0] + std::tan(x[1]) + x[2] * x[2] * x[2] + std::log(x[3] + 0.1) + 3.0 * x[4] + x[5] +
             std::sqrt(x[6] + 0.1);
  }
  return 0.0;
}

std::pair<Dataset, Dataset> gen_dataset(const DgpSpec& d) {
  d.validate();
  Rng train_rng = Rng::stream(d.seed, kTrainStream);
  Rng test_rng = Rng::stream(d.seed, kTestStream);
  Dataset train = clean_sample(d, train_rng);
  Dataset test = clean_sample(d, test_rng);

  const auto m = static_cast<std::size_t>(std::floor(d.delta * static_cast<double>(d.n) + 1e-9));
  if (m > 0) {
    Rng crng = Rng::stream(d.seed, kContamStream);
    std::vector<std::size_t> idx(d.n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    // partial Fisher-Yates: the first m entries are a uniform draw without replacement
    for (std::size_t k = 0; k < m; ++k) std::swap(idx[k], idx[k + crng.index(d.n - k)]);
    std::sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(m));
    const Contamination law = contamination_law(d.function_id);
    for (std::size_t k = 0; k < m; ++k) {
      const auto i = static_cast<Eigen::Index>(idx[k]);
      train.contaminated[idx[k]] = true;
      if (d.function_id == 6) {
        train.x(i, 0) = crng.uniform(-10.0, 10.0);
        train.x(i, 1) = crng.uniform(-10.0, 10.0);
        train.y[i] = crng.normal(law.mean, law.sd);
      } else {
        train.y[i] = target(d, train.x, i) + crng.normal(law.mean, law.sd);
      }
    }
  }
  return {std::move(train), std::move(test)};
}

NetworkSpec default_architecture(int id) {
  switch (id) {
    case 1:
      return NetworkSpec::make(1, {5}, Activation::relu());
    case 2:
      return NetworkSpec::make(1, {10}, Activation::sigmoid());
    case 3:
      return NetworkSpec::make(1, {50, 50, 50, 50, 50}, Activation::relu());
    case 4:
      return NetworkSpec::make(2, {15}, Activation::sigmoid());
    case 5:
      return NetworkSpec::make(2, {10}, Activation::relu());
    case 6:
      return NetworkSpec::make(2, {30}, Activation::gelu());
    case 7:
      return NetworkSpec::make(7, {30, 30, 30}, Activation::relu());
    default:
      check_id(id);
  }
  return {};
}

}  // namespace rrnet
