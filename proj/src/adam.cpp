#include "rrnet/adam.hpp"

#include <cmath>
#include <numeric>
#include <vector>

#include "rrnet/rng.hpp"

namespace rrnet {

void adam_step(AdamState& state, const AdamSettings& settings, ParamVector& theta, const Eigen::VectorXd& grad) {
  if (state.m.size() != theta.size()) state.reset(theta.size());
  ++state.step;
  state.m = settings.beta1 * state.m + (1.0 - settings.beta1) * grad;
  state.v = settings.beta2 * state.v + (1.0 - settings.beta2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(settings.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(settings.beta2, static_cast<double>(state.step));
  theta.array() -= settings.learning_rate * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + settings.eps);
}

ParamVector run_adam_epochs(ParamVector theta, std::size_t n, std::size_t epochs, std::size_t batch_size,
                            const AdamSettings& settings, std::uint64_t seed, const BatchGradient& grad) {
  AdamState state;
  state.reset(theta.size());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (n <= batch_size) {
    for (std::size_t e = 0; e < epochs; ++e) adam_step(state, settings, theta, grad(theta, order));
    return theta;
  }
  Rng rng = Rng::stream(seed, 0x6164616d);
  for (std::size_t e = 0; e < epochs; ++e) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < n; start += batch_size) {
      const std::size_t len = std::min(batch_size, n - start);
      adam_step(state, settings, theta, grad(theta, std::span<const std::size_t>(order.data() + start, len)));
    }
  }
  return theta;
}

}  // namespace rrnet
