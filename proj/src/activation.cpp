#include "rrnet/activation.hpp"

#include <charconv>
#include <cmath>
#include <numbers>

#include "rrnet/error.hpp"
#include "rrnet/format.hpp"

namespace rrnet {

namespace {

double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

Activation Activation::softplus(double m) {
  if (!(m > 0.0) || !std::isfinite(m)) throw InvalidArgument("softplus sharpness must be a positive finite number");
  return {ActivationKind::SoftplusM, m};
}

double Activation::value(double z) const {
  switch (kind) {
    case ActivationKind::Identity:
      return z;
    case ActivationKind::Sigmoid:
      return logistic(z);
    case ActivationKind::Tanh:
      return std::tanh(z);
    case ActivationKind::ReLU:
      return z > 0.0 ? z : 0.0;
    case ActivationKind::GELU:
      return 0.5 * z * std::erfc(-z / std::numbers::sqrt2);
    case ActivationKind::SoftplusM: {
      const double mz = sharpness * z;
      if (mz > 30.0) return z + std::log1p(std::exp(-mz)) / sharpness;
      return std::log1p(std::exp(mz)) / sharpness;
    }
  }
  return z;
}

double Activation::derivative(double z, KinkConvention kink) const {
  switch (kind) {
    case ActivationKind::Identity:
      return 1.0;
    case ActivationKind::Sigmoid: {
      double s = logistic(z);
      return s * (1.0 - s);
    }
    case ActivationKind::Tanh: {
      double t = std::tanh(z);
      return 1.0 - t * t;
    }
    case ActivationKind::ReLU:
      if (z > 0.0) return 1.0;
      if (z < 0.0) return 0.0;
      return kink == KinkConvention::Half ? 0.5 : 0.0;
    case ActivationKind::GELU: {
      const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
      const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
      return cdf + z * pdf;
    }
    case ActivationKind::SoftplusM:
      return logistic(sharpness * z);
  }
  return 1.0;
}

std::string Activation::name() const {
  switch (kind) {
    case ActivationKind::Identity:
      return "identity";
    case ActivationKind::Sigmoid:
      return "sigmoid";
    case ActivationKind::Tanh:
      return "tanh";
    case ActivationKind::ReLU:
      return "relu";
    case ActivationKind::GELU:
      return "gelu";
    case ActivationKind::SoftplusM:
      return "softplus:" + format_double(sharpness);
  }
  return "identity";
}

Activation Activation::parse(const std::string& text) {
  if (text == "identity" || text == "linear") return identity();
  if (text == "sigmoid") return sigmoid();
  if (text == "tanh") return tanh();
  if (text == "relu") return relu();
  if (text == "gelu") return gelu();
  if (text == "softplus") return softplus(1.0);
  if (text.rfind("softplus:", 0) == 0) {
    const std::string arg = text.substr(9);
    double m = 0.0;
    auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), m);
    if (ec != std::errc() || ptr != arg.data() + arg.size())
      throw InvalidArgument("bad softplus sharpness '" + arg + "'");
    return softplus(m);
  }
  throw InvalidArgument("unknown activation '" + text + "'");
}

}  // namespace rrnet
