#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rrnet/competitors.hpp"
#include "rrnet/dataset.hpp"
#include "rrnet/dgp.hpp"
#include "rrnet/error_model.hpp"
#include "rrnet/metrics.hpp"
#include "rrnet/network.hpp"
#include "rrnet/trainer.hpp"

namespace rrnet {

/// A training method: the DPD scheme at some beta, or a baseline loss.
struct Method {
  bool is_dpd = true;
  double beta = 0.0;
  ErrorModel model = ErrorModel::gaussian();
  double sigma_floor = 1e-3;
  CompetitorLoss competitor;

  static Method dpd(double beta, ErrorModel model = ErrorModel::gaussian());
  static Method baseline(CompetitorLoss loss);
  /// "dpd:<beta>" or a competitor name (lse, mae, lmls, huber, tukey, lts, lta).
  static Method parse(const std::string& text);

  /// "rrnet" or the competitor name.
  std::string name() const;
  /// name, with ":<beta>" appended for the DPD scheme.
  std::string label() const;
};

FitResult fit_method(const Method& m, const NetworkSpec& spec, const Dataset& data, const TrainConfig& tc);

/// Runs task(i) for i in [0, count) on up to `jobs` threads (0 = hardware
/// concurrency). Tasks must not share mutable state.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& task);

struct Failure {
  std::string method;
  std::string unit;  // "rep=3", "fold=2", ...
  std::string message;
};

struct ReplicationConfig {
  DgpSpec dgp;  // seed is the base seed; replication r uses base + r
  std::vector<Method> methods;
  std::size_t reps = 1;
  TrainConfig train;
  std::optional<NetworkSpec> architecture;  // default_architecture(dgp.function_id) when unset
  std::size_t jobs = 0;
};

struct ReplicationResult {
  std::vector<Method> methods;
  std::vector<MetricReport> reports;  // parallel to methods; reps entries each, NaN when missing
  double delta = 0.0;
  std::vector<Failure> failures;

  /// `method,beta,delta,metric,mean,stderr,R` with metric in {train_tmse, test_mse}.
  std::string results_csv() const;
  /// `method,beta,delta,rep,train_tmse,test_mse` with one row per cell.
  std::string long_csv() const;
};

ReplicationResult run_replications(const ReplicationConfig& cfg);

struct BreakdownConfig {
  NetworkSpec spec;
  ErrorModel model = ErrorModel::gaussian();
  Dataset base;
  std::vector<double> deltas;
  std::vector<double> magnitudes;
  std::vector<double> betas;
  TrainConfig train;
  std::uint64_t seed = 0;  // selects the contaminated rows
  std::size_t jobs = 0;
};

struct BreakdownRow {
  double delta = 0.0;
  double magnitude = 0.0;
  double beta = 0.0;
  double max_abs_fit = 0.0;  // max_i |mu_hat(x_i)| over the base design
  double sigma_hat = 0.0;
};

struct BreakdownResult {
  std::vector<BreakdownRow> rows;
  std::vector<BreakdownRow> clean;  // one per beta, fit on the uncontaminated base data
  std::vector<Failure> failures;

  /// `delta,magnitude,beta,max_abs_fit,sigma_hat`; clean fits appear with delta 0.
  std::string to_csv() const;
};

/// floor(delta n) responses (chosen by `seed`) are replaced by y = M.
BreakdownResult breakdown_stress(const BreakdownConfig& cfg);

struct CvConfig {
  Dataset data;
  std::size_t k = 10;
  std::vector<Method> methods;
  double trim = 0.2;
  TrainConfig train;
  std::optional<NetworkSpec> architecture;  // defaults to one hidden layer of 10 sigmoid units
  std::uint64_t seed = 0;  // fold assignment
  std::size_t jobs = 0;
};

struct CvResult {
  std::vector<Method> methods;
  std::vector<std::vector<double>> fold_tmse;  // [method][fold], NaN when missing
  std::vector<double> cv_tmse;                 // mean over completed folds
  std::vector<Failure> failures;

  /// `method,beta,k,trim,cv_tmse,folds_completed`
  std::string to_csv(double trim) const;
};

/// Fold of each observation: a seeded shuffle dealt round-robin into k folds.
std::vector<std::size_t> fold_assignment(std::size_t n, std::size_t k, std::uint64_t seed);

CvResult kfold_cv(const CvConfig& cfg);

std::string failures_csv(const std::vector<Failure>& failures);

}  // namespace rrnet
