#include "rrnet/runs.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include <json.hpp>

#include "rrnet/csv.hpp"
#include "rrnet/dgp.hpp"
#include "rrnet/error.hpp"
#include "rrnet/experiments.hpp"
#include "rrnet/format.hpp"
#include "rrnet/influence.hpp"
#include "rrnet/rng.hpp"

namespace rrnet {

namespace fs = std::filesystem;

namespace {

// Reads keys with their defaults and remembers the effective value of
// every key consulted, for the metadata echo.
class Settings {
 public:
  explicit Settings(const RunConfig& cfg) : cfg_(cfg) {}

  std::string str(const std::string& key, const std::string& fallback) {
    std::string v = cfg_.get(key, fallback);
    used_[key] = v;
    return v;
  }
  double num(const std::string& key, double fallback) {
    const double v = cfg_.get_double(key, fallback);
    used_[key] = cfg_.has(key) ? cfg_.get(key, "") : format_double(fallback);
    return v;
  }
  std::uint64_t u64(const std::string& key, std::uint64_t fallback) {
    const std::uint64_t v = cfg_.get_u64(key, fallback);
    used_[key] = std::to_string(v);
    return v;
  }
  std::size_t size(const std::string& key, std::size_t fallback) { return static_cast<std::size_t>(u64(key, fallback)); }
  std::vector<double> nums(const std::string& key, const std::vector<double>& fallback) {
    std::vector<double> v = cfg_.get_doubles(key, fallback);
    std::string echo;
    for (std::size_t k = 0; k < v.size(); ++k) echo += (k ? "," : "") + format_double(v[k]);
    used_[key] = echo;
    return v;
  }
  std::vector<std::string> list(const std::string& key, const std::string& fallback) {
    return split_list(str(key, fallback));
  }
  bool has(const std::string& key) const { return cfg_.has(key); }

  const std::map<std::string, std::string>& used() const { return used_; }

 private:
  const RunConfig& cfg_;
  std::map<std::string, std::string> used_;
};

class Output {
 public:
  explicit Output(const std::string& dir) : dir_(dir) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  }

  void write(const std::string& name, const std::string& content) {
    const fs::path p = dir_ / name;
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write '" + p.string() + "'");
    f << content;
    if (!f) throw IoError("write failed for '" + p.string() + "'");
    files.push_back(name);
  }

  std::vector<std::string> files;

 private:
  fs::path dir_;
};

TrainConfig train_config(Settings& s) {
  TrainConfig tc;
  tc.epochs = s.size("epochs", tc.epochs);
  tc.batch_size = s.size("batch_size", tc.batch_size);
  tc.adam.learning_rate = s.num("lr", tc.adam.learning_rate);
  tc.max_outer = s.size("max_outer", tc.max_outer);
  tc.tol = s.num("tol", tc.tol);
  tc.gtol = s.num("gtol", tc.gtol);
  tc.max_sigma_iters = s.size("max_sigma_iters", tc.max_sigma_iters);
  const std::string solver = s.str("sigma_solver", "qn");
  if (solver == "qn" || solver == "quasi-newton")
    tc.sigma_solver = SigmaSolver::QuasiNewton;
  else if (solver == "fixed-point" || solver == "fp")
    tc.sigma_solver = SigmaSolver::FixedPoint;
  else
    throw InvalidArgument("sigma_solver must be qn or fixed-point, got '" + solver + "'");
  tc.seed = s.u64("seed", 0);
  tc.validate();
  return tc;
}

// "lse,dpd" with betas 0.1,0.3 -> lse, rrnet:0.1, rrnet:0.3
std::vector<Method> expand_methods(const std::vector<std::string>& names, const std::vector<double>& betas,
                                   const ErrorModel& model, double floor) {
  std::vector<Method> out;
  for (const auto& name : names) {
    if (name == "dpd" || name == "rrnet") {
      if (betas.empty()) throw InvalidArgument("method 'dpd' needs at least one beta");
      for (double b : betas) {
        Method m = Method::dpd(b, model);
        m.sigma_floor = floor;
        out.push_back(m);
      }
    } else {
      Method m = Method::parse(name);
      m.sigma_floor = floor;
      out.push_back(m);
    }
  }
  if (out.empty()) throw InvalidArgument("no methods requested");
  return out;
}

LoadedCsv load_data(Settings& s) {
  const std::string path = s.str("data", "");
  if (path.empty()) throw InvalidArgument("missing required key 'data' (path to a CSV file)");
  return load_csv(path, s.str("response", ""), parse_scale_policy(s.str("scale", "covariates")));
}

std::string metadata(const RunConfig& cfg, const Settings& s, const RunOutcome& outcome) {
  nlohmann::ordered_json j;
  j["subcommand"] = cfg.subcommand();
  j["seed"] = cfg.get_u64("seed", 0);
  j["generator"] = Rng::kGeneratorName;
  nlohmann::ordered_json conf = nlohmann::ordered_json::object();
  for (const auto& [k, v] : s.used()) conf[k] = v;
  j["config"] = conf;
  j["outputs"] = outcome.files;
  j["failures"] = outcome.failures;
  if (!outcome.warnings.empty()) j["warnings"] = outcome.warnings;
  return j.dump(2) + "\n";
}

void finish_failures(Output& out, RunOutcome& outcome, const std::vector<Failure>& failures) {
  outcome.failures = failures.size();
  if (!failures.empty()) {
    out.write("failures.csv", failures_csv(failures));
    outcome.status = RunStatus::Partial;
  }
}

void run_train(Settings& s, Output& out, RunOutcome& outcome) {
  const LoadedCsv csv = load_data(s);
  outcome.warnings = csv.warnings;
  const NetworkSpec spec = parse_architecture(s.str("arch", "10;sigmoid"), csv.data.dim());
  const TrainConfig tc = train_config(s);
  const ErrorModel model = ErrorModel::parse(s.str("model", "gaussian"));
  const std::string method = s.str("method", "dpd");
  FitResult f;
  if (method == "dpd" || method == "rrnet") {
    DpdConfig cfg{s.num("beta", 0.0), s.num("sigma_floor", 1e-3), model};
    cfg.validate();
    f = fit(cfg, spec, csv.data, tc);
  } else {
    f = fit_competitor(CompetitorLoss::parse(method), spec, csv.data, tc);
  }
  out.write("model.ckpt", checkpoint_to_string(spec, f.theta));
  out.write("trace.csv", f.trace_csv());
  const Eigen::VectorXd fitted = predict(spec, f.theta, csv.data.x);
  std::string res = "row,y,fitted,residual\n";
  for (Eigen::Index i = 0; i < fitted.size(); ++i)
    res += std::to_string(i + 1) + "," + format_double(csv.data.y[i]) + "," + format_double(fitted[i]) + "," +
           format_double(csv.data.y[i] - fitted[i]) + "\n";
  out.write("residuals.csv", res);
  out.write("fit.csv", "sigma,outer_iters,descent_violations,final_loss\n" + format_double(f.sigma) + "," +
                           std::to_string(f.outer_iters) + "," + std::to_string(f.descent_violations) + "," +
                           format_double(f.loss_trace.back()) + "\n");
}

int phi_id(Settings& s, int fallback) {
  const std::uint64_t id = s.u64("phi", static_cast<std::uint64_t>(fallback));
  if (id < 1 || id > 7) throw InvalidArgument("phi must be in 1..7, got " + std::to_string(id));
  return static_cast<int>(id);
}

void run_benchmark(Settings& s, Output& out, RunOutcome& outcome) {
  ReplicationConfig rc;
  const int id = phi_id(s, 1);
  rc.dgp = DgpSpec::defaults(id, s.num("delta", 0.0), s.u64("seed", 0));
  rc.dgp.n = s.size("n", rc.dgp.n);
  rc.dgp.sigma = s.num("sigma", rc.dgp.sigma);
  rc.dgp.validate();
  rc.reps = s.size("reps", (id == 3 || id == 7) ? 25 : 100);
  rc.train = train_config(s);
  const ErrorModel model = ErrorModel::parse(s.str("model", "gaussian"));
  rc.methods = expand_methods(s.list("methods", "lse,dpd"), s.nums("betas", {0.1, 0.3, 0.5}), model,
                              s.num("sigma_floor", 1e-3));
  if (s.has("arch")) rc.architecture = parse_architecture(s.str("arch", ""), rc.dgp.input_dim());
  rc.jobs = s.size("jobs", 0);
  const ReplicationResult res = run_replications(rc);
  out.write("results.csv", res.results_csv());
  out.write("replications.csv", res.long_csv());
  finish_failures(out, outcome, res.failures);
}

struct TGrid {
  double lo, hi;
  std::size_t count;
};

std::vector<double> linspace(const TGrid& g) {
  std::vector<double> t(g.count);
  for (std::size_t k = 0; k < g.count; ++k)
    t[k] = g.count == 1 ? g.lo : g.lo + (g.hi - g.lo) * static_cast<double>(k) / static_cast<double>(g.count - 1);
  return t;
}

TGrid parse_tgrid(const std::string& text) {
  std::vector<std::string> parts;
  std::string_view rest = text;
  for (auto c = rest.find(':'); ; c = rest.find(':')) {
    parts.emplace_back(trim(rest.substr(0, c)));
    if (c == std::string_view::npos) break;
    rest.remove_prefix(c + 1);
  }
  if (parts.size() != 3) throw InvalidArgument("tgrid must look like lo:hi:count, got '" + text + "'");
  const auto lo = parse_double(parts[0]), hi = parse_double(parts[1]);
  const auto n = parse_int<std::size_t>(parts[2]);
  if (!lo || !hi || !n || *n < 2 || !(*hi > *lo))
    throw InvalidArgument("tgrid must look like lo:hi:count with lo < hi and count >= 2, got '" + text + "'");
  return {*lo, *hi, *n};
}

void run_influence(Settings& s, Output& out, RunOutcome&) {
  const std::string preset = s.str("preset", "ex31");
  if (preset != "ex31" && preset != "ex32") throw InvalidArgument("preset must be ex31 or ex32, got '" + preset + "'");
  const std::uint64_t i = s.u64("i", 2);
  if (i < 1 || i > 50) throw InvalidArgument("i is a 1-based observation index in 1..50, got " + std::to_string(i));
  const std::vector<double> betas = s.nums("beta", {0.0, 0.5});
  if (betas.empty()) throw InvalidArgument("influence needs at least one beta");
  const ErrorModel model = ErrorModel::parse(s.str("model", "gaussian"));
  const std::vector<double> m_values = s.nums("m_values", {1.0, 10.0, 100.0, 1000.0});

  for (double b : betas) {
    IfSetup setup = preset == "ex31" ? example_sigmoid_setup(b, i) : example_relu_setup(b, i);
    setup.model = model;
    const InfluenceAnalyzer an(setup);
    const double xi = setup.design(static_cast<Eigen::Index>(i - 1), 0);
    // default grid: mu_i +/- 10 sigma
    const std::string grid = s.str("tgrid", "auto");
    const TGrid g = grid == "auto" ? TGrid{an.mu_i() - 1.0, an.mu_i() + 1.0, 401} : parse_tgrid(grid);
    const std::vector<double> t = linspace(g);
    const std::vector<double> x = {s.num("x", xi)};
    const std::string tag = "if_beta" + format_double(b);
    out.write(tag + "_theta.csv", an.theta_curve(t).to_csv());
    out.write(tag + "_sigma.csv", an.sigma_curve(t).to_csv());
    out.write(tag + "_predictor.csv", an.predictor_curve(t, x).to_csv());
    if (preset == "ex32") out.write(tag + "_relu_limit.csv", if_relu_limit(setup, t, x, m_values).to_csv());
  }
}

void run_breakdown(Settings& s, Output& out, RunOutcome& outcome) {
  BreakdownConfig bc;
  bc.model = ErrorModel::parse(s.str("model", "gaussian"));
  bc.seed = s.u64("seed", 0);
  if (s.has("data")) {
    const LoadedCsv csv = load_data(s);
    outcome.warnings = csv.warnings;
    bc.base = csv.data;
    bc.spec = parse_architecture(s.str("arch", "10;sigmoid"), bc.base.dim());
  } else {
    const int id = phi_id(s, 2);
    bc.base = gen_dataset(DgpSpec::defaults(id, 0.0, bc.seed)).first;
    bc.spec = s.has("arch") ? parse_architecture(s.str("arch", ""), bc.base.dim()) : default_architecture(id);
  }
  bc.deltas = s.nums("deltas", {0.1, 0.2, 0.3, 0.4});
  bc.magnitudes = s.nums("magnitudes", {1e2, 1e4, 1e6});
  bc.betas = s.nums("betas", {0.0, 0.5});
  bc.train = train_config(s);
  bc.jobs = s.size("jobs", 0);
  const BreakdownResult res = breakdown_stress(bc);
  out.write("breakdown.csv", res.to_csv());
  finish_failures(out, outcome, res.failures);
}

void run_cv(Settings& s, Output& out, RunOutcome& outcome) {
  CvConfig cc;
  const LoadedCsv csv = load_data(s);
  outcome.warnings = csv.warnings;
  cc.data = csv.data;
  cc.k = s.size("k", 10);
  cc.trim = s.num("trim", 0.2);
  cc.seed = s.u64("seed", 0);
  cc.train = train_config(s);
  const ErrorModel model = ErrorModel::parse(s.str("model", "gaussian"));
  cc.methods = expand_methods(s.list("methods", "lse,dpd"), s.nums("betas", {0.1, 0.3, 0.5}), model,
                              s.num("sigma_floor", 1e-3));
  cc.architecture = parse_architecture(s.str("arch", "10;sigmoid"), cc.data.dim());
  cc.jobs = s.size("jobs", 0);
  const CvResult res = kfold_cv(cc);
  out.write("cv.csv", res.to_csv(cc.trim));
  std::string folds = "method,beta,fold,tmse\n";
  for (std::size_t m = 0; m < res.methods.size(); ++m)
    for (std::size_t f = 0; f < res.fold_tmse[m].size(); ++f)
      folds += res.methods[m].name() + "," + (res.methods[m].is_dpd ? format_double(res.methods[m].beta) : "") + "," +
               std::to_string(f + 1) + "," + format_double(res.fold_tmse[m][f]) + "\n";
  out.write("cv_folds.csv", folds);
  finish_failures(out, outcome, res.failures);
}

}  // namespace

TrainConfig train_config_from(const RunConfig& cfg) {
  Settings s(cfg);
  return train_config(s);
}

NetworkSpec parse_architecture(const std::string& text, std::size_t input_dim) {
  const auto semis = std::count(text.begin(), text.end(), ';');
  if (semis == 2) {
    NetworkSpec spec = NetworkSpec::parse_descriptor(text);
    if (spec.input_dim != input_dim)
      throw ShapeError(0, "architecture '" + text + "' expects " + std::to_string(spec.input_dim) +
                              " inputs, data has " + std::to_string(input_dim));
    return spec;
  }
  if (semis == 1) return NetworkSpec::parse_descriptor(std::to_string(input_dim) + ";" + text);
  throw InvalidArgument("architecture '" + text + "' must look like K1,K2;activation");
}

RunOutcome execute(const RunConfig& cfg) {
  Settings s(cfg);
  RunOutcome outcome;
  Output out(s.str("out", "rrnet_out"));
  const std::string& sub = cfg.subcommand();
  if (sub == "train")
    run_train(s, out, outcome);
  else if (sub == "benchmark")
    run_benchmark(s, out, outcome);
  else if (sub == "influence")
    run_influence(s, out, outcome);
  else if (sub == "breakdown")
    run_breakdown(s, out, outcome);
  else
    run_cv(s, out, outcome);
  s.size("jobs", 0);
  outcome.files = out.files;
  outcome.files.push_back("metadata.json");
  out.write("metadata.json", metadata(cfg, s, outcome));
  return outcome;
}

}  // namespace rrnet
