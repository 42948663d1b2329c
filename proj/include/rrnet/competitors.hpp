#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "rrnet/dataset.hpp"
#include "rrnet/network.hpp"
#include "rrnet/trainer.hpp"

namespace rrnet {

enum class CompetitorKind { MSE, MAE, LMLS, Huber, Tukey, LTS, LTA };

/// Baseline robust losses on raw residuals (no scale estimate).
struct CompetitorLoss {
  CompetitorKind kind = CompetitorKind::MSE;
  double c = 0.0;                  // Huber / Tukey tuning constant
  std::optional<std::size_t> h;    // LTS / LTA: number of residuals kept; default ceil(0.75 n)

  static CompetitorLoss mse() { return {CompetitorKind::MSE, 0.0, std::nullopt}; }
  static CompetitorLoss mae() { return {CompetitorKind::MAE, 0.0, std::nullopt}; }
  static CompetitorLoss lmls() { return {CompetitorKind::LMLS, 0.0, std::nullopt}; }
  static CompetitorLoss huber(double c = 1.345) { return {CompetitorKind::Huber, c, std::nullopt}; }
  static CompetitorLoss tukey(double c = 4.685) { return {CompetitorKind::Tukey, c, std::nullopt}; }
  static CompetitorLoss lts(std::optional<std::size_t> h = std::nullopt) { return {CompetitorKind::LTS, 0.0, h}; }
  static CompetitorLoss lta(std::optional<std::size_t> h = std::nullopt) { return {CompetitorKind::LTA, 0.0, h}; }

  /// lse (or mse), mae, lmls, huber, tukey, lts, lta.
  static CompetitorLoss parse(const std::string& name);
  std::string name() const;
  bool is_trimmed() const { return kind == CompetitorKind::LTS || kind == CompetitorKind::LTA; }

  /// Residuals kept by a trimmed loss evaluated on `n_eval` of `n_full`
  /// observations; h is rescaled proportionally for mini-batches.
  std::size_t kept(std::size_t n_eval, std::size_t n_full) const;

  void validate() const;
};

/// Per-residual rho for the untrimmed losses (squared / absolute residual
/// for LTS / LTA), and its derivative with 0 at the kink.
double competitor_rho(const CompetitorLoss& loss, double r);
double competitor_rho_prime(const CompetitorLoss& loss, double r);

/// Mean loss over `residuals`; trimmed losses average the h smallest terms.
double comp_loss(const CompetitorLoss& loss, const Eigen::VectorXd& residuals);

/// Gradient in theta of comp_loss over the rows in `batch` (all rows if
/// empty). For trimmed losses the kept set is frozen at the current residuals.
ParamVector comp_grad(const CompetitorLoss& loss, const NetworkSpec& spec, const ParamVector& theta,
                      const Dataset& data, std::span<const std::size_t> batch = {},
                      KinkConvention kink = KinkConvention::Zero);

/// Same outer/inner ADAM loop as `fit`, with the scale machinery removed.
/// FitResult::sigma is NaN.
FitResult fit_competitor(const CompetitorLoss& loss, const NetworkSpec& spec, const Dataset& data,
                         const TrainConfig& tc);

}  // namespace rrnet
