#include "rrnet/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "rrnet/error.hpp"
#include "rrnet/format.hpp"
#include "rrnet/rng.hpp"

namespace rrnet {

namespace {

constexpr std::uint64_t kFoldStream = 0x666f6c64;       // "fold"
constexpr std::uint64_t kBreakdownStream = 0x6272656b;  // "brek"
const double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string beta_field(const Method& m) { return m.is_dpd ? format_double(m.beta) : ""; }

double max_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

Method Method::dpd(double beta, ErrorModel model) {
  Method m;
  m.is_dpd = true;
  m.beta = beta;
  m.model = model;
  DpdConfig{beta, 1e-3, model}.validate();
  return m;
}

Method Method::baseline(CompetitorLoss loss) {
  Method m;
  m.is_dpd = false;
  m.competitor = loss;
  return m;
}

Method Method::parse(const std::string& text) {
  const std::string t{trim(text)};
  for (const char* prefix : {"dpd:", "rrnet:"}) {
    const std::string p = prefix;
    if (t.rfind(p, 0) != 0) continue;
    std::string rest = t.substr(p.size());
    ErrorModel model = ErrorModel::gaussian();
    if (const auto colon = rest.find(':'); colon != std::string::npos) {
      model = ErrorModel::parse(rest.substr(colon + 1));
      rest = rest.substr(0, colon);
    }
    const auto b = parse_double(rest);
    if (!b) throw InvalidArgument("method '" + t + "': beta is not a number");
    return dpd(*b, model);
  }
  return baseline(CompetitorLoss::parse(t));
}

std::string Method::name() const { return is_dpd ? "rrnet" : competitor.name(); }

std::string Method::label() const {
  if (!is_dpd) return competitor.name();
  std::string s = "rrnet:" + format_double(beta);
  if (model.family() != ErrorFamily::Gaussian) s += ":" + model.name();
  return s;
}

FitResult fit_method(const Method& m, const NetworkSpec& spec, const Dataset& data, const TrainConfig& tc) {
  if (m.is_dpd) return fit(DpdConfig{m.beta, m.sigma_floor, m.model}, spec, data, tc);
  return fit_competitor(m.competitor, spec, data, tc);
}

void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& task) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, count);
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (std::size_t w = 0; w < jobs; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(error_mu);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::string failures_csv(const std::vector<Failure>& failures) {
  std::string out = "method,unit,message\n";
  for (const auto& f : failures) {
    std::string msg = f.message;
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    std::replace(msg.begin(), msg.end(), '"', '\'');
    out += f.method + "," + f.unit + ",\"" + msg + "\"\n";
  }
  return out;
}

// ---------------------------------------------------------------- replications

std::string ReplicationResult::results_csv() const {
  std::string out = "method,beta,delta,metric,mean,stderr,R\n";
  const std::string d = format_double(delta);
  for (std::size_t m = 0; m < methods.size(); ++m) {
    const auto emit = [&](const char* metric, const Summary& s) {
      out += methods[m].name() + "," + beta_field(methods[m]) + "," + d + "," + metric + "," + format_double(s.mean) +
             "," + format_double(s.stderr_) + "," + std::to_string(s.count) + "\n";
    };
    emit("train_tmse", reports[m].tmse_summary());
    emit("test_mse", reports[m].test_summary());
  }
  return out;
}

std::string ReplicationResult::long_csv() const {
  std::string out = "method,beta,delta,rep,train_tmse,test_mse\n";
  const std::string d = format_double(delta);
  for (std::size_t m = 0; m < methods.size(); ++m)
    for (std::size_t r = 0; r < reports[m].train_tmse.size(); ++r)
      out += methods[m].name() + "," + beta_field(methods[m]) + "," + d + "," + std::to_string(r) + "," +
             format_double(reports[m].train_tmse[r]) + "," + format_double(reports[m].test_mse[r]) + "\n";
  return out;
}

ReplicationResult run_replications(const ReplicationConfig& cfg) {
  if (cfg.reps == 0) throw InvalidArgument("number of replications must be at least 1");
  if (cfg.methods.empty()) throw InvalidArgument("no methods requested");
  cfg.dgp.validate();
  cfg.train.validate();
  const NetworkSpec spec = cfg.architecture ? *cfg.architecture : default_architecture(cfg.dgp.function_id);
  spec.validate();
  if (spec.input_dim != cfg.dgp.input_dim())
    throw ShapeError(0, "architecture expects " + std::to_string(spec.input_dim) + " inputs, phi" +
                            std::to_string(cfg.dgp.function_id) + " has " + std::to_string(cfg.dgp.input_dim()));

  ReplicationResult res;
  res.methods = cfg.methods;
  res.delta = cfg.dgp.delta;
  res.reports.resize(cfg.methods.size());
  for (auto& r : res.reports) {
    r.trim_fraction = cfg.dgp.delta;
    r.train_tmse.assign(cfg.reps, kNaN);
    r.test_mse.assign(cfg.reps, kNaN);
  }
  std::vector<std::string> errors(cfg.reps * cfg.methods.size());

  // Each task regenerates its replication's data; generation is cheap and
  // keeps tasks independent.
  const std::size_t nm = cfg.methods.size();
  parallel_for(cfg.reps * nm, cfg.jobs, [&](std::size_t task) {
    const std::size_t rep = task / nm, m = task % nm;
    try {
      DgpSpec d = cfg.dgp;
      d.seed = cfg.dgp.seed + rep;
      const auto [train, test] = gen_dataset(d);
      TrainConfig tc = cfg.train;
      tc.seed = d.seed;
      const FitResult f = fit_method(cfg.methods[m], spec, train, tc);
      res.reports[m].train_tmse[rep] = tmse(train.y, predict(spec, f.theta, train.x), d.delta);
      res.reports[m].test_mse[rep] = mse(test.y, predict(spec, f.theta, test.x));
    } catch (const std::exception& e) {
      errors[task] = e.what();
    }
  });
  for (std::size_t task = 0; task < errors.size(); ++task)
    if (!errors[task].empty())
      res.failures.push_back({cfg.methods[task % nm].label(), "rep=" + std::to_string(task / nm), errors[task]});
  return res;
}

// ---------------------------------------------------------------- breakdown

std::string BreakdownResult::to_csv() const {
  std::string out = "delta,magnitude,beta,max_abs_fit,sigma_hat\n";
  auto emit = [&](const BreakdownRow& r) {
    out += format_double(r.delta) + "," + format_double(r.magnitude) + "," + format_double(r.beta) + "," +
           format_double(r.max_abs_fit) + "," + format_double(r.sigma_hat) + "\n";
  };
  for (const auto& r : clean) emit(r);
  for (const auto& r : rows) emit(r);
  return out;
}

BreakdownResult breakdown_stress(const BreakdownConfig& cfg) {
  cfg.spec.validate();
  cfg.train.validate();
  if (cfg.base.empty()) throw InvalidArgument("breakdown study needs a non-empty base dataset");
  cfg.base.validate();
  if (cfg.base.dim() != cfg.spec.input_dim)
    throw ShapeError(0, "base dataset has " + std::to_string(cfg.base.dim()) + " features, network expects " +
                            std::to_string(cfg.spec.input_dim));
  if (cfg.betas.empty()) throw InvalidArgument("breakdown study needs at least one beta");
  for (double d : cfg.deltas)
    if (!(d >= 0.0 && d < 0.5)) throw InvalidArgument("contamination fractions must lie in [0, 0.5)");
  for (double b : cfg.betas) DpdConfig{b, 1e-3, cfg.model}.validate();

  const std::size_t n = cfg.base.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = Rng::stream(cfg.seed, kBreakdownStream);
  rng.shuffle(std::span<std::size_t>(order));

  struct Cell {
    double delta, magnitude, beta;
    bool clean;
  };
  std::vector<Cell> cells;
  for (double b : cfg.betas) cells.push_back({0.0, 0.0, b, true});
  for (double d : cfg.deltas)
    for (double mag : cfg.magnitudes)
      for (double b : cfg.betas) cells.push_back({d, mag, b, false});

  std::vector<BreakdownRow> out(cells.size());
  std::vector<std::string> errors(cells.size());
  parallel_for(cells.size(), cfg.jobs, [&](std::size_t i) {
    const Cell& c = cells[i];
    try {
      Dataset data = cfg.base;
      if (!c.clean) {
        const auto m = static_cast<std::size_t>(std::floor(c.delta * static_cast<double>(n) + 1e-9));
        for (std::size_t k = 0; k < m; ++k) {
          data.y[static_cast<Eigen::Index>(order[k])] = c.magnitude;
          data.contaminated[order[k]] = true;
        }
      }
      const FitResult f = fit(DpdConfig{c.beta, 1e-3, cfg.model}, cfg.spec, data, cfg.train);
      out[i] = {c.delta, c.magnitude, c.beta, max_abs(predict(cfg.spec, f.theta, cfg.base.x)), f.sigma};
    } catch (const std::exception& e) {
      errors[i] = e.what();
      out[i] = {c.delta, c.magnitude, c.beta, kNaN, kNaN};
    }
  });

  BreakdownResult res;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    (cells[i].clean ? res.clean : res.rows).push_back(out[i]);
    if (!errors[i].empty())
      res.failures.push_back({"rrnet:" + format_double(cells[i].beta),
                              "delta=" + format_double(cells[i].delta) + ";M=" + format_double(cells[i].magnitude),
                              errors[i]});
  }
  return res;
}

// ---------------------------------------------------------------- cross-validation

std::vector<std::size_t> fold_assignment(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2 || k > n) throw InvalidArgument("number of folds must satisfy 2 <= k <= n");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = Rng::stream(seed, kFoldStream);
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<std::size_t> fold(n);
  for (std::size_t pos = 0; pos < n; ++pos) fold[order[pos]] = pos % k;
  return fold;
}

std::string CvResult::to_csv(double trim_fraction) const {
  std::string out = "method,beta,k,trim,cv_tmse,folds_completed\n";
  for (std::size_t m = 0; m < methods.size(); ++m) {
    const std::size_t done = static_cast<std::size_t>(
        std::count_if(fold_tmse[m].begin(), fold_tmse[m].end(), [](double v) { return !std::isnan(v); }));
    out += methods[m].name() + "," + beta_field(methods[m]) + "," + std::to_string(fold_tmse[m].size()) + "," +
           format_double(trim_fraction) + "," + format_double(cv_tmse[m]) + "," + std::to_string(done) + "\n";
  }
  return out;
}

CvResult kfold_cv(const CvConfig& cfg) {
  if (cfg.methods.empty()) throw InvalidArgument("no methods requested");
  if (cfg.data.empty()) throw InvalidArgument("cross-validation needs a non-empty dataset");
  cfg.data.validate();
  cfg.train.validate();
  if (!(cfg.trim >= 0.0 && cfg.trim < 1.0)) throw InvalidArgument("trim fraction must lie in [0, 1)");
  const std::size_t n = cfg.data.size();
  const std::vector<std::size_t> fold = fold_assignment(n, cfg.k, cfg.seed);
  const NetworkSpec spec =
      cfg.architecture ? *cfg.architecture : NetworkSpec::make(cfg.data.dim(), {10}, Activation::sigmoid());
  spec.validate();
  if (spec.input_dim != cfg.data.dim())
    throw ShapeError(0, "dataset has " + std::to_string(cfg.data.dim()) + " features, network expects " +
                            std::to_string(spec.input_dim));

  CvResult res;
  res.methods = cfg.methods;
  const std::size_t nm = cfg.methods.size();
  res.fold_tmse.assign(nm, std::vector<double>(cfg.k, kNaN));
  std::vector<std::string> errors(nm * cfg.k);
  parallel_for(nm * cfg.k, cfg.jobs, [&](std::size_t task) {
    const std::size_t f = task / nm, m = task % nm;
    try {
      std::vector<std::size_t> tr, te;
      for (std::size_t i = 0; i < n; ++i) (fold[i] == f ? te : tr).push_back(i);
      const Dataset train = cfg.data.subset(tr);
      const Dataset test = cfg.data.subset(te);
      const FitResult r = fit_method(cfg.methods[m], spec, train, cfg.train);
      res.fold_tmse[m][f] = tmse(test.y, predict(spec, r.theta, test.x), cfg.trim);
    } catch (const std::exception& e) {
      errors[task] = e.what();
    }
  });
  for (std::size_t m = 0; m < nm; ++m) res.cv_tmse.push_back(summarize(res.fold_tmse[m]).mean);
  for (std::size_t task = 0; task < errors.size(); ++task)
    if (!errors[task].empty())
      res.failures.push_back({cfg.methods[task % nm].label(), "fold=" + std::to_string(task / nm), errors[task]});
  return res;
}

}  // namespace rrnet
