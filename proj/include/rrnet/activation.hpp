#pragma once

#include <string>

namespace rrnet {

enum class ActivationKind { Identity, Sigmoid, Tanh, ReLU, GELU, SoftplusM };

/// Value assigned to ReLU'(0). `Half` is the Heaviside limit H(0) = 1/2 of
/// the softplus smoothing sequence; `Zero` is what autodiff frameworks use.
enum class KinkConvention { Zero, Half };

/// Element-wise hidden-layer activation.
///
/// SoftplusM(m) is (1/m) ln(1 + e^{m z}), the smoothing sequence that
/// converges uniformly to ReLU with sup gap ln(2)/m. GELU is the exact
/// z * Phi(z) form.
struct Activation {
  ActivationKind kind = ActivationKind::Identity;
  double sharpness = 1.0;  // only read for SoftplusM

  static Activation identity() { return {ActivationKind::Identity, 1.0}; }
  static Activation sigmoid() { return {ActivationKind::Sigmoid, 1.0}; }
  static Activation tanh() { return {ActivationKind::Tanh, 1.0}; }
  static Activation relu() { return {ActivationKind::ReLU, 1.0}; }
  static Activation gelu() { return {ActivationKind::GELU, 1.0}; }
  static Activation softplus(double m);

  double value(double z) const;
  double derivative(double z, KinkConvention kink = KinkConvention::Zero) const;
  bool is_smooth() const { return kind != ActivationKind::ReLU; }

  /// Round-trips through `parse`: identity, sigmoid, tanh, relu, gelu, softplus:<m>.
  std::string name() const;
  static Activation parse(const std::string& text);

  friend bool operator==(const Activation&, const Activation&) = default;
};

}  // namespace rrnet
