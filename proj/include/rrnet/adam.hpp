#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>

#include <Eigen/Dense>

#include "rrnet/network.hpp"

namespace rrnet {

struct AdamSettings {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// First/second moment estimates and the step count used for bias correction.
struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  std::size_t step = 0;

  void reset(Eigen::Index dim) {
    m = Eigen::VectorXd::Zero(dim);
    v = Eigen::VectorXd::Zero(dim);
    step = 0;
  }
};

void adam_step(AdamState& state, const AdamSettings& settings, ParamVector& theta, const Eigen::VectorXd& grad);

/// Gradient of the objective over the given row indices at theta.
using BatchGradient = std::function<Eigen::VectorXd(const ParamVector&, std::span<const std::size_t>)>;

/// `epochs` passes of mini-batch ADAM starting from fresh moments. Each epoch
/// shuffles 0..n-1 with a stream derived from `seed` and cuts it into
/// contiguous chunks of `batch_size` (the last may be shorter). When
/// n <= batch_size every step uses all rows in index order.
ParamVector run_adam_epochs(ParamVector theta, std::size_t n, std::size_t epochs, std::size_t batch_size,
                            const AdamSettings& settings, std::uint64_t seed, const BatchGradient& grad);

}  // namespace rrnet
