#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rrnet/activation.hpp"

namespace rrnet {

/// Flat parameter vector theta. Layout, per hidden layer l = 1..L: vec(W_l)
/// column-stacked (W_l is K_l x K_{l-1}), then b_l; finally the output
/// weights with the output bias first: (w0_out, w1_out, ..., wK_out).
using ParamVector = Eigen::VectorXd;

/// Fully connected MLP with scalar linear output.
struct NetworkSpec {
  std::size_t input_dim = 1;
  std::vector<std::size_t> hidden_widths;
  std::vector<Activation> activations;  // one per hidden layer

  static NetworkSpec make(std::size_t input_dim, std::vector<std::size_t> widths, Activation activation);

  std::size_t depth() const { return hidden_widths.size(); }
  /// Width of layer l, with layer 0 being the input.
  std::size_t width(std::size_t l) const { return l == 0 ? input_dim : hidden_widths[l - 1]; }
  std::size_t param_count() const;
  /// Offset of vec(W_l) in theta (l = 1..L), and of the output block for l = L+1.
  std::size_t layer_offset(std::size_t l) const;
  bool is_smooth() const;
  bool has_relu() const;
  void validate() const;

  /// `p;K_1,...,K_L;activation` where activation is one name for all layers
  /// or a comma list with one name per layer.
  std::string descriptor() const;
  static NetworkSpec parse_descriptor(const std::string& text);

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

/// Per-layer pre-activations z_l and post-activations phi(z_l) for a batch
/// held column-wise (one observation per column). post[0] is the input.
struct ForwardCache {
  std::vector<Eigen::MatrixXd> pre;
  std::vector<Eigen::MatrixXd> post;
  Eigen::VectorXd output;
};

/// Throws ShapeError if theta does not have exactly `spec.param_count()` entries.
void check_params(const NetworkSpec& spec, const ParamVector& theta);

double forward(const NetworkSpec& spec, const ParamVector& theta, std::span<const double> x);

/// mu(x_i, theta) for every row x_i of `xs` (n x p).
Eigen::VectorXd forward_batch(const NetworkSpec& spec, const ParamVector& theta, const Eigen::MatrixXd& xs);

/// `inputs` is p x B (one observation per column).
ForwardCache forward_cached(const NetworkSpec& spec, const ParamVector& theta, const Eigen::MatrixXd& inputs);

/// grad += sum_b coeffs[b] * d mu(x_b, theta) / d theta (reverse mode).
void accumulate_vjp(const NetworkSpec& spec, const ParamVector& theta, const ForwardCache& cache,
                    const Eigen::VectorXd& coeffs, KinkConvention kink, Eigen::VectorXd& grad);

/// A selection from the subdifferential of mu(x, .) at theta; the gradient at smooth points.
ParamVector grad_theta(const NetworkSpec& spec, const ParamVector& theta, std::span<const double> x,
                       KinkConvention kink = KinkConvention::Zero);

/// n x d matrix whose row i is grad_theta at row i of `xs`.
Eigen::MatrixXd jacobian(const NetworkSpec& spec, const ParamVector& theta, const Eigen::MatrixXd& xs,
                         KinkConvention kink);

/// Glorot uniform weights on +-sqrt(6 / (fan_in + fan_out)); all biases zero.
ParamVector glorot_init(const NetworkSpec& spec, std::uint64_t seed);

/// Replaces every ReLU with SoftplusM(m).
NetworkSpec smooth_network(const NetworkSpec& spec, double m);

/// Applies the hidden-unit permutation `perm` to layer l (1-based): rows of
/// W_l, entries of b_l and the matching columns of the next layer.
ParamVector permute_hidden_units(const NetworkSpec& spec, const ParamVector& theta, std::size_t layer,
                                 std::span<const std::size_t> perm);

// Checkpoint text format: descriptor line, parameter count line, then one
// parameter per line with 17 significant digits.
struct Checkpoint {
  NetworkSpec spec;
  ParamVector theta;
};

std::string checkpoint_to_string(const NetworkSpec& spec, const ParamVector& theta);
Checkpoint checkpoint_from_string(const std::string& text, const std::string& source = "<checkpoint>");
void save_checkpoint(const std::string& path, const NetworkSpec& spec, const ParamVector& theta);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace rrnet
