#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>

#include "rrnet/dataset.hpp"
#include "rrnet/network.hpp"

namespace rrnet {

/// Simulation design for one of the seven benchmark target functions.
///
///   phi1  |x|^{2/3}              n=401 grid on [-2, 2]          sigma 0.1   eps ~ N(2, 1)
///   phi2  sin(x)/x               n=151 grid on [-7.5, 7.5]      sigma 0.1   eps ~ N(2, 4)
///   phi3  Doppler on [0, 1]      n=800 Uniform(0, 1)            sigma 0.1   eps ~ N(2, 1)
///   phi4  x1 exp(-|x|^2)         16 x 16 grid on [-2, 2]^2      sigma 0.1   eps ~ N(2, 4)
///   phi5  half-circle spiral     z: 100 grid on [0, pi]         sigma 0.01  eps ~ N(0, 4)
///   phi6  three Gaussian bumps   n=200 Uniform[-1, 1]^2         sigma 0.05  (x, y) ~ U[-10, 10]^2, N(10, 10)
///   phi7  7-variate sum          n=200 Uniform[0, 1]^7          sigma 1     eps ~ N(5, 25)
///
/// N(m, v) is mean and variance.
struct DgpSpec {
  int function_id = 1;  // 1..7
  std::size_t n = 0;
  double sigma = 0.0;
  double delta = 0.0;   // contamination fraction in [0, 0.5)
  std::uint64_t seed = 0;

  /// Table defaults for `function_id`, with the given contamination and seed.
  static DgpSpec defaults(int function_id, double delta = 0.0, std::uint64_t seed = 0);
  std::size_t input_dim() const;
  void validate() const;
};

/// Closed-form target. For phi5 returns atan2(x1, x2), the angle z with
/// x = (sin z, cos z). Throws InvalidArgument outside the stated domain.
double eval_phi(int function_id, std::span<const double> x);

/// Training sample (contaminated per the design) and a clean test sample of
/// the same size. Train, test and contamination draws use disjoint streams.
std::pair<Dataset, Dataset> gen_dataset(const DgpSpec& dgp);

/// Architecture used for each target (activation, L, K_l).
NetworkSpec default_architecture(int function_id);

}  // namespace rrnet
