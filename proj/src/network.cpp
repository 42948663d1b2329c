#include "rrnet/network.hpp"

#include <cmath>
#include <sstream>

#include "rrnet/error.hpp"
#include "rrnet/format.hpp"
#include "rrnet/rng.hpp"

namespace rrnet {

NetworkSpec NetworkSpec::make(std::size_t input_dim, std::vector<std::size_t> widths, Activation activation) {
  NetworkSpec spec;
  spec.input_dim = input_dim;
  spec.activations.assign(widths.size(), activation);
  spec.hidden_widths = std::move(widths);
  spec.validate();
  return spec;
}

std::size_t NetworkSpec::param_count() const {
  std::size_t d = 0;
  for (std::size_t l = 1; l <= depth(); ++l) d += (width(l - 1) + 1) * width(l);
  return d + width(depth()) + 1;
}

std::size_t NetworkSpec::layer_offset(std::size_t l) const {
  std::size_t off = 0;
  for (std::size_t k = 1; k < l && k <= depth(); ++k) off += (width(k - 1) + 1) * width(k);
  return off;
}

bool NetworkSpec::is_smooth() const {
  for (const auto& a : activations)
    if (!a.is_smooth()) return false;
  return true;
}

bool NetworkSpec::has_relu() const { return !is_smooth(); }

void NetworkSpec::validate() const {
  if (input_dim == 0) throw InvalidArgument("network input dimension must be positive");
  if (activations.size() != hidden_widths.size())
    throw InvalidArgument("need one activation per hidden layer (" + std::to_string(hidden_widths.size()) +
                          " layers, " + std::to_string(activations.size()) + " activations)");
  for (std::size_t l = 0; l < hidden_widths.size(); ++l)
    if (hidden_widths[l] == 0) throw ShapeError(l + 1, "hidden width must be positive");
}

std::string NetworkSpec::descriptor() const {
  std::string s = std::to_string(input_dim) + ";";
  for (std::size_t l = 0; l < hidden_widths.size(); ++l) {
    if (l) s += ",";
    s += std::to_string(hidden_widths[l]);
  }
  s += ";";
  bool uniform = true;
  for (const auto& a : activations) uniform = uniform && a == activations.front();
  if (activations.empty()) {
    s += "identity";
  } else if (uniform) {
    s += activations.front().name();
  } else {
    for (std::size_t l = 0; l < activations.size(); ++l) {
      if (l) s += ",";
      s += activations[l].name();
    }
  }
  return s;
}

namespace {

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.emplace_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

NetworkSpec NetworkSpec::parse_descriptor(const std::string& text) {
  auto parts = split(text, ';');
  if (parts.size() != 3) throw InvalidArgument("network descriptor '" + text + "' must look like p;K_1,...,K_L;activation");
  NetworkSpec spec;
  auto p = parse_int<std::size_t>(parts[0]);
  if (!p || *p == 0) throw InvalidArgument("bad input dimension '" + parts[0] + "' in descriptor '" + text + "'");
  spec.input_dim = *p;
  if (!parts[1].empty()) {
    for (const auto& w : split(parts[1], ',')) {
      auto k = parse_int<std::size_t>(w);
      if (!k || *k == 0) throw InvalidArgument("bad hidden width '" + w + "' in descriptor '" + text + "'");
      spec.hidden_widths.push_back(*k);
    }
  }
  auto acts = split(parts[2], ',');
  if (spec.hidden_widths.empty()) {
    // A linear model has no hidden activation; accept any single name.
    if (acts.size() != 1) throw InvalidArgument("linear descriptor '" + text + "' takes a single activation name");
    Activation::parse(acts.front());
  } else if (acts.size() == 1) {
    spec.activations.assign(spec.hidden_widths.size(), Activation::parse(acts.front()));
  } else if (acts.size() == spec.hidden_widths.size()) {
    for (const auto& a : acts) spec.activations.push_back(Activation::parse(a));
  } else {
    throw InvalidArgument("descriptor '" + text + "' lists " + std::to_string(acts.size()) + " activations for " +
                          std::to_string(spec.hidden_widths.size()) + " hidden layers");
  }
  spec.validate();
  return spec;
}

void check_params(const NetworkSpec& spec, const ParamVector& theta) {
  const auto have = static_cast<std::size_t>(theta.size());
  if (have == spec.param_count()) return;
  std::size_t used = 0;
  for (std::size_t l = 1; l <= spec.depth() + 1; ++l) {
    const std::size_t need = l <= spec.depth() ? (spec.width(l - 1) + 1) * spec.width(l) : spec.width(spec.depth()) + 1;
    if (used + need > have)
      throw ShapeError(l, "parameter vector has " + std::to_string(have) + " entries but the network needs " +
                              std::to_string(spec.param_count()) + "; it runs out inside this layer");
    used += need;
  }
  throw ShapeError(spec.depth() + 1, "parameter vector has " + std::to_string(have) + " entries; only " +
                                         std::to_string(spec.param_count()) + " are consumed");
}

ForwardCache forward_cached(const NetworkSpec& spec, const ParamVector& theta, const Eigen::MatrixXd& inputs) {
  check_params(spec, theta);
  if (static_cast<std::size_t>(inputs.rows()) != spec.input_dim)
    throw ShapeError(0, "input has " + std::to_string(inputs.rows()) + " features, expected " +
                            std::to_string(spec.input_dim));
  const std::size_t L = spec.depth();
  ForwardCache cache;
  cache.pre.resize(L + 1);
  cache.post.resize(L + 1);
  cache.post[0] = inputs;
  std::size_t off = 0;
  for (std::size_t l = 1; l <= L; ++l) {
    const auto rows = static_cast<Eigen::Index>(spec.width(l));
    const auto cols = static_cast<Eigen::Index>(spec.width(l - 1));
    Eigen::Map<const Eigen::MatrixXd> W(theta.data() + off, rows, cols);
    Eigen::Map<const Eigen::VectorXd> b(theta.data() + off + rows * cols, rows);
    off += static_cast<std::size_t>((cols + 1) * rows);
    cache.pre[l].noalias() = W * cache.post[l - 1];
    cache.pre[l].colwise() += b;
    const Activation& act = spec.activations[l - 1];
    cache.post[l] = cache.pre[l].unaryExpr([&act](double z) { return act.value(z); });
  }
  const auto K = static_cast<Eigen::Index>(spec.width(L));
  const double w0 = theta[static_cast<Eigen::Index>(off)];
  Eigen::Map<const Eigen::VectorXd> w(theta.data() + off + 1, K);
  cache.output.noalias() = cache.post[L].transpose() * w;
  cache.output.array() += w0;
  return cache;
}

void accumulate_vjp(const NetworkSpec& spec, const ParamVector& theta, const ForwardCache& cache,
                    const Eigen::VectorXd& coeffs, KinkConvention kink, Eigen::VectorXd& grad) {
  const std::size_t L = spec.depth();
  if (grad.size() != theta.size()) grad = Eigen::VectorXd::Zero(theta.size());
  const std::size_t out_off = spec.layer_offset(L + 1);
  const auto K = static_cast<Eigen::Index>(spec.width(L));
  grad[static_cast<Eigen::Index>(out_off)] += coeffs.sum();
  grad.segment(static_cast<Eigen::Index>(out_off) + 1, K).noalias() += cache.post[L] * coeffs;
  if (L == 0) return;

  // delta holds dLoss/dz_l for the current layer, one column per observation.
  Eigen::Map<const Eigen::VectorXd> w_out(theta.data() + out_off + 1, K);
  Eigen::MatrixXd delta = w_out * coeffs.transpose();
  for (std::size_t l = L; l >= 1; --l) {
    const Activation& act = spec.activations[l - 1];
    delta.array() *= cache.pre[l].unaryExpr([&act, kink](double z) { return act.derivative(z, kink); }).array();
    const auto rows = static_cast<Eigen::Index>(spec.width(l));
    const auto cols = static_cast<Eigen::Index>(spec.width(l - 1));
    const auto off = static_cast<Eigen::Index>(spec.layer_offset(l));
    Eigen::Map<Eigen::MatrixXd> gW(grad.data() + off, rows, cols);
    gW.noalias() += delta * cache.post[l - 1].transpose();
    grad.segment(off + rows * cols, rows).noalias() += delta.rowwise().sum();
    if (l > 1) {
      Eigen::Map<const Eigen::MatrixXd> W(theta.data() + off, rows, cols);
      Eigen::MatrixXd next = W.transpose() * delta;
      delta = std::move(next);
    }
  }
}

double forward(const NetworkSpec& spec, const ParamVector& theta, std::span<const double> x) {
  Eigen::Map<const Eigen::MatrixXd> col(x.data(), static_cast<Eigen::Index>(x.size()), 1);
  return forward_cached(spec, theta, col).output[0];
}

Eigen::VectorXd forward_batch(const NetworkSpec& spec, const ParamVector& theta, const Eigen::MatrixXd& xs) {
  if (static_cast<std::size_t>(xs.cols()) != spec.input_dim)
    throw ShapeError(0, "design has " + std::to_string(xs.cols()) + " columns, expected " +
                            std::to_string(spec.input_dim));
  return forward_cached(spec, theta, xs.transpose()).output;
}

ParamVector grad_theta(const NetworkSpec& spec, const ParamVector& theta, std::span<const double> x,
                       KinkConvention kink) {
  Eigen::Map<const Eigen::MatrixXd> col(x.data(), static_cast<Eigen::Index>(x.size()), 1);
  ForwardCache cache = forward_cached(spec, theta, col);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(theta.size());
  accumulate_vjp(spec, theta, cache, Eigen::VectorXd::Ones(1), kink, g);
  return g;
}

Eigen::MatrixXd jacobian(const NetworkSpec& spec, const ParamVector& theta, const Eigen::MatrixXd& xs,
                         KinkConvention kink) {
  if (static_cast<std::size_t>(xs.cols()) != spec.input_dim)
    throw ShapeError(0, "design has " + std::to_string(xs.cols()) + " columns, expected " +
                            std::to_string(spec.input_dim));
  Eigen::MatrixXd J(xs.rows(), theta.size());
  std::vector<double> x(spec.input_dim);
  for (Eigen::Index i = 0; i < xs.rows(); ++i) {
    for (std::size_t j = 0; j < spec.input_dim; ++j) x[j] = xs(i, static_cast<Eigen::Index>(j));
    J.row(i) = grad_theta(spec, theta, x, kink).transpose();
  }
  return J;
}

ParamVector glorot_init(const NetworkSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng = Rng::stream(seed, 0x6c6f72);
  ParamVector theta = ParamVector::Zero(static_cast<Eigen::Index>(spec.param_count()));
  const std::size_t L = spec.depth();
  for (std::size_t l = 1; l <= L + 1; ++l) {
    const std::size_t fan_in = spec.width(l - 1);
    const std::size_t fan_out = l <= L ? spec.width(l) : 1;
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    const std::size_t off = spec.layer_offset(l);
    if (l <= L) {
      for (std::size_t k = 0; k < fan_in * fan_out; ++k)
        theta[static_cast<Eigen::Index>(off + k)] = rng.uniform(-limit, limit);
    } else {
      for (std::size_t k = 0; k < fan_in; ++k)
        theta[static_cast<Eigen::Index>(off + 1 + k)] = rng.uniform(-limit, limit);
    }
  }
  return theta;
}

NetworkSpec smooth_network(const NetworkSpec& spec, double m) {
  if (!(m > 0.0)) throw InvalidArgument("smoothing sharpness m must be positive");
  NetworkSpec out = spec;
  for (auto& a : out.activations)
    if (a.kind == ActivationKind::ReLU) a = Activation::softplus(m);
  return out;
}

ParamVector permute_hidden_units(const NetworkSpec& spec, const ParamVector& theta, std::size_t layer,
                                 std::span<const std::size_t> perm) {
  check_params(spec, theta);
  if (layer == 0 || layer > spec.depth()) throw ShapeError(layer, "not a hidden layer");
  const std::size_t K = spec.width(layer);
  if (perm.size() != K) throw ShapeError(layer, "permutation has wrong length");
  ParamVector out = theta;
  const std::size_t cols = spec.width(layer - 1);
  const std::size_t off = spec.layer_offset(layer);
  // new unit k takes old unit perm[k]
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t j = 0; j < cols; ++j)
      out[static_cast<Eigen::Index>(off + j * K + k)] = theta[static_cast<Eigen::Index>(off + j * K + perm[k])];
    out[static_cast<Eigen::Index>(off + cols * K + k)] = theta[static_cast<Eigen::Index>(off + cols * K + perm[k])];
  }
  const std::size_t next = spec.layer_offset(layer + 1);
  if (layer == spec.depth()) {
    for (std::size_t k = 0; k < K; ++k)
      out[static_cast<Eigen::Index>(next + 1 + k)] = theta[static_cast<Eigen::Index>(next + 1 + perm[k])];
  } else {
    const std::size_t rows = spec.width(layer + 1);
    for (std::size_t k = 0; k < K; ++k)
      for (std::size_t r = 0; r < rows; ++r)
        out[static_cast<Eigen::Index>(next + k * rows + r)] = theta[static_cast<Eigen::Index>(next + perm[k] * rows + r)];
  }
  return out;
}

}  // namespace rrnet
