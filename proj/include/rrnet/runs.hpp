#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rrnet/network.hpp"
#include "rrnet/run_config.hpp"
#include "rrnet/trainer.hpp"

namespace rrnet {

enum class RunStatus { Ok, Partial };

struct RunOutcome {
  RunStatus status = RunStatus::Ok;
  std::vector<std::string> files;     // written, relative to the output directory
  std::size_t failures = 0;           // missing cells; listed in failures.csv
  std::vector<std::string> warnings;
};

/// Executes the configured subcommand and writes its outputs (CSV results
/// plus metadata.json) into `out` (default "rrnet_out"). Throws on errors
/// that prevent any result; per-cell failures give RunStatus::Partial.
RunOutcome execute(const RunConfig& cfg);

/// Optimizer settings from the common keys.
TrainConfig train_config_from(const RunConfig& cfg);

/// "K1,K2;act" (input dimension taken from `input_dim`) or a full
/// "p;K1,K2;act" descriptor. ";identity" is the linear model.
NetworkSpec parse_architecture(const std::string& text, std::size_t input_dim);

}  // namespace rrnet
