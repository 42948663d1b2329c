// rrnet: batch front end for training, benchmarks, influence curves,
// breakdown studies and cross-validation.
//
//   rrnet train --data d.csv --beta 0.3 --out run1
//   rrnet benchmark --phi 5 --delta 0.3 --reps 100 --methods lse,dpd --betas 0.3
//   rrnet influence --preset ex31 --beta 0,0.5 --i 2
//
// Settings come from --config (flat key = value file) and are overridden by
// flags. Exit status: 0 success, 1 error, 2 some cells failed (failures.csv).

#include <cstdio>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "rrnet/rrnet.h"

namespace {

struct KeyHelp {
  const char* key;
  const char* help;
};

// Flags per subcommand; each maps onto the config key of the same name.
const std::vector<KeyHelp> kCommon = {
    {"seed", "base random seed"},
    {"out", "output directory (default rrnet_out)"},
    {"jobs", "concurrent tasks (default: logical CPUs)"},
    {"epochs", "ADAM epochs per outer iteration (100)"},
    {"batch_size", "mini-batch size (32)"},
    {"lr", "ADAM step size (0.001)"},
    {"max_outer", "maximum outer iterations (50)"},
    {"tol", "stop when an outer iteration gains less than this (1e-6)"},
    {"gtol", "scale-solver gradient tolerance (1e-5)"},
    {"max_sigma_iters", "scale-solver iteration cap (15000)"},
    {"sigma_solver", "qn or fixed-point"},
    {"sigma_floor", "lower bound for the scale (0.001)"},
    {"model", "error model: gaussian, laplace, logistic"},
    {"arch", "hidden layers and activation, e.g. 10;sigmoid or 50,50;relu"},
};

const std::map<std::string, std::vector<KeyHelp>> kSpecific = {
    {"train",
     {{"data", "CSV file with a header row"},
      {"response", "response column name or 1-based number (default: last)"},
      {"scale", "none, covariates or all (default covariates)"},
      {"beta", "DPD tuning parameter in [0, 1]"},
      {"method", "dpd (default) or lse, mae, lmls, huber, tukey, lts, lta"}}},
    {"benchmark",
     {{"phi", "target function 1..7"},
      {"delta", "contamination fraction in [0, 0.5)"},
      {"reps", "replications (100; 25 for phi 3 and 7)"},
      {"methods", "comma list; dpd expands over --betas"},
      {"betas", "comma list of beta values"},
      {"n", "override the sample size"},
      {"sigma", "override the error scale"}}},
    {"influence",
     {{"preset", "ex31 (sigmoid) or ex32 (ReLU)"},
      {"beta", "comma list of beta values"},
      {"i", "contaminated observation, 1-based"},
      {"tgrid", "lo:hi:count (default mu_i +/- 10 sigma, 401 points)"},
      {"x", "feature value for the predictor curve (default x_i)"},
      {"m_values", "softplus sharpness sequence for ex32"}}},
    {"breakdown",
     {{"phi", "target function for the base data (default 2)"},
      {"data", "CSV base data instead of a target function"},
      {"response", "response column"},
      {"scale", "none, covariates or all"},
      {"deltas", "comma list of contamination fractions"},
      {"magnitudes", "comma list of outlier values M"},
      {"betas", "comma list of beta values"}}},
    {"cv",
     {{"data", "CSV file with a header row"},
      {"response", "response column"},
      {"scale", "none, covariates or all"},
      {"k", "number of folds (10)"},
      {"methods", "comma list; dpd expands over --betas"},
      {"betas", "comma list of beta values"},
      {"trim", "trimming fraction of the held-out TMSE (0.2)"}}},
};

int fail(const char* what) {
  std::fprintf(stderr, "rrnet: error: %s: %s\n", what, rrnet_last_error());
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust regression neural networks via density power divergence"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(rrnet_version()));

  std::map<std::string, std::map<std::string, std::string>> flags;
  std::map<std::string, std::string> config_paths;
  const std::vector<std::pair<std::string, const char*>> subs = {
      {"train", "fit one network to a CSV dataset"},
      {"benchmark", "Monte Carlo replications on a simulated target"},
      {"influence", "influence-function curves for the 1-1-1 presets"},
      {"breakdown", "fits under growing outlier magnitude"},
      {"cv", "k-fold trimmed cross-validation on a CSV dataset"},
  };
  for (const auto& [name, desc] : subs) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", config_paths[name], "key = value settings file");
    auto add = [&](const KeyHelp& k) {
      const std::string key = k.key;
      sub->add_option("--" + key, flags[name][key], k.help);
    };
    for (const auto& k : kSpecific.at(name)) add(k);
    for (const auto& k : kCommon) add(k);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  for (const auto& [name, desc] : subs) {
    CLI::App* sub = app.get_subcommand(name);
    if (!sub->parsed()) continue;

    rrnet_config* cfg = nullptr;
    if (rrnet_config_create(name.c_str(), &cfg) != RRNET_OK) return fail("config");
    const std::string& path = config_paths[name];
    if (!path.empty() && rrnet_config_load_file(cfg, path.c_str()) != RRNET_OK) {
      rrnet_config_free(cfg);
      return fail("config");
    }
    for (const auto& [key, value] : flags[name]) {
      if (sub->count("--" + key) == 0) continue;
      if (rrnet_config_set(cfg, key.c_str(), value.c_str()) != RRNET_OK) {
        rrnet_config_free(cfg);
        return fail(("--" + key).c_str());
      }
    }
    size_t failures = 0;
    const rrnet_status st = rrnet_run(cfg, &failures);
    rrnet_config_free(cfg);
    if (st != RRNET_OK && st != RRNET_PARTIAL) return fail(name.c_str());
    std::fputs(rrnet_last_run_summary(), stdout);
    if (st == RRNET_PARTIAL) {
      std::fprintf(stderr, "rrnet: %zu cell(s) failed; see failures.csv\n", failures);
      return 2;
    }
    return 0;
  }
  return 1;
}
