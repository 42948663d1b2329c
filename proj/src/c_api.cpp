#include "rrnet/rrnet.h"

#include <cmath>
#include <exception>
#include <memory>
#include <new>
#include <string>

#include "rrnet/competitors.hpp"
#include "rrnet/csv.hpp"
#include "rrnet/dgp.hpp"
#include "rrnet/dpd_loss.hpp"
#include "rrnet/error.hpp"
#include "rrnet/network.hpp"
#include "rrnet/run_config.hpp"
#include "rrnet/runs.hpp"
#include "rrnet/trainer.hpp"

struct rrnet_config {
  rrnet::RunConfig cfg;
};

struct rrnet_network {
  rrnet::NetworkSpec spec;
  rrnet::ParamVector theta;
};

struct rrnet_dataset {
  rrnet::Dataset data;
};

struct rrnet_fit {
  rrnet::FitResult result;
};

namespace {

thread_local std::string g_last_error;
thread_local std::string g_last_summary;

rrnet_status code_of(rrnet::ErrorCode c) {
  switch (c) {
    case rrnet::ErrorCode::InvalidArgument:
      return RRNET_ERR_INVALID_ARGUMENT;
    case rrnet::ErrorCode::Shape:
      return RRNET_ERR_SHAPE;
    case rrnet::ErrorCode::Parse:
      return RRNET_ERR_PARSE;
    case rrnet::ErrorCode::Io:
      return RRNET_ERR_IO;
    case rrnet::ErrorCode::Numeric:
      return RRNET_ERR_NUMERIC;
    case rrnet::ErrorCode::Unsupported:
      return RRNET_ERR_UNSUPPORTED;
  }
  return RRNET_ERR_INTERNAL;
}

template <class F>
rrnet_status guarded(F&& body) {
  try {
    return body();
  } catch (const rrnet::Error& e) {
    g_last_error = e.what();
    return code_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return RRNET_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RRNET_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return RRNET_ERR_INTERNAL;
  }
}

rrnet_status null_arg(const char* what) {
  g_last_error = std::string("null argument: ") + what;
  return RRNET_ERR_INVALID_ARGUMENT;
}

#define RRNET_REQUIRE(ptr)               \
  do {                                   \
    if ((ptr) == nullptr) return null_arg(#ptr); \
  } while (0)

rrnet::TrainConfig settings_of(const rrnet_config* s) {
  return s ? rrnet::train_config_from(s->cfg) : rrnet::TrainConfig{};
}

void check_fit_inputs(const rrnet_network* net, const rrnet_dataset* data) {
  if (data->data.dim() != net->spec.input_dim)
    throw rrnet::ShapeError(0, "dataset has " + std::to_string(data->data.dim()) + " features, network expects " +
                                   std::to_string(net->spec.input_dim));
}

}  // namespace

extern "C" {

RRNET_API const char* rrnet_version(void) { return "1.0.0"; }

RRNET_API const char* rrnet_status_name(rrnet_status status) {
  switch (status) {
    case RRNET_OK:
      return "ok";
    case RRNET_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case RRNET_ERR_IO:
      return "i/o error";
    case RRNET_ERR_PARSE:
      return "parse error";
    case RRNET_ERR_SHAPE:
      return "shape error";
    case RRNET_ERR_NUMERIC:
      return "numeric error";
    case RRNET_ERR_UNSUPPORTED:
      return "unsupported model";
    case RRNET_PARTIAL:
      return "partial failure";
    case RRNET_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

RRNET_API const char* rrnet_last_error(void) { return g_last_error.c_str(); }

RRNET_API rrnet_status rrnet_config_create(const char* subcommand, rrnet_config** out) {
  RRNET_REQUIRE(subcommand);
  RRNET_REQUIRE(out);
  return guarded([&] {
    *out = new rrnet_config{rrnet::RunConfig(subcommand)};
    return RRNET_OK;
  });
}

RRNET_API void rrnet_config_free(rrnet_config* cfg) { delete cfg; }

RRNET_API rrnet_status rrnet_config_set(rrnet_config* cfg, const char* key, const char* value) {
  RRNET_REQUIRE(cfg);
  RRNET_REQUIRE(key);
  RRNET_REQUIRE(value);
  return guarded([&] {
    cfg->cfg.set(key, value);
    return RRNET_OK;
  });
}

RRNET_API rrnet_status rrnet_config_load_file(rrnet_config* cfg, const char* path) {
  RRNET_REQUIRE(cfg);
  RRNET_REQUIRE(path);
  return guarded([&] {
    cfg->cfg.merge_file(path);
    return RRNET_OK;
  });
}

RRNET_API rrnet_status rrnet_run(const rrnet_config* cfg, size_t* n_failures) {
  RRNET_REQUIRE(cfg);
  g_last_summary.clear();
  return guarded([&] {
    const rrnet::RunOutcome outcome = rrnet::execute(cfg->cfg);
    for (const auto& f : outcome.files) g_last_summary += f + "\n";
    for (const auto& w : outcome.warnings) g_last_summary += "warning: " + w + "\n";
    if (n_failures) *n_failures = outcome.failures;
    if (outcome.status == rrnet::RunStatus::Partial) {
      g_last_error = std::to_string(outcome.failures) + " cell(s) failed; see failures.csv";
      return RRNET_PARTIAL;
    }
    return RRNET_OK;
  });
}

RRNET_API const char* rrnet_last_run_summary(void) { return g_last_summary.c_str(); }

RRNET_API rrnet_status rrnet_network_create(const char* descriptor, rrnet_network** out) {
  RRNET_REQUIRE(descriptor);
  RRNET_REQUIRE(out);
  return guarded([&] {
    auto net = std::make_unique<rrnet_network>();
    net->spec = rrnet::NetworkSpec::parse_descriptor(descriptor);
    net->theta = rrnet::ParamVector::Zero(static_cast<Eigen::Index>(net->spec.param_count()));
    *out = net.release();
    return RRNET_OK;
  });
}

RRNET_API rrnet_status rrnet_network_load(const char* path, rrnet_network** out) {
  RRNET_REQUIRE(path);
  RRNET_REQUIRE(out);
  return guarded([&] {
    rrnet::Checkpoint ck = rrnet::load_checkpoint(path);
    *out = new rrnet_network{std::move(ck.spec), std::move(ck.theta)};
    return RRNET_OK;
  });
}

RRNET_API rrnet_status rrnet_network_save(const rrnet_network* net, const char* path) {
  RRNET_REQUIRE(net);
  RRNET_REQUIRE(path);
  return guarded([&] {
    rrnet::save_checkpoint(path, net->spec, net->theta);
    return RRNET_OK;
  });
}

RRNET_API void rrnet_network_free(rrnet_network* net) { delete net; }

RRNET_API rrnet_status rrnet_network_param_count(const rrnet_network* net, size_t* out) {
  RRNET_REQUIRE(net);
  RRNET_REQUIRE(out);
  *out = net->spec.param_count();
  return RRNET_OK;
}

RRNET_API rrnet_status rrnet_network_input_dim(const rrnet_network* net, size_t* out) {
  RRNET_REQUIRE(net);
  RRNET_REQUIRE(out);
  *out = net->spec.input_dim;
  return RRNET_OK;
}

RRNET_API rrnet_status rrnet_network_get_params(const rrnet_network* net, double* out, size_t len) {
  RRNET_REQUIRE(net);
  RRNET_REQUIRE(out);
  return guarded([&] {
    if (len != static_cast<size_t>(net->theta.size()))
      throw rrnet::ShapeError(0, "buffer holds " + std::to_string(len) + " values, network has " +
                                     std::to_string(net->theta.size()) + " parameters");
    for (Eigen::Index k = 0; k < net->theta.size(); ++k) out[k] = net->theta[k];
    return RRNET_OK;
  });
}

RRNET_API rrnet_status rrnet_network_set_params(rrnet_network* net, const double* theta, size_t len) {
  RRNET_REQUIRE(net);
  RRNET_REQUIRE(theta);
  return guarded([&] {
    rrnet::ParamVector t = Eigen::Map<const Eigen::VectorXd>(theta, static_cast<Eigen::Index>(len));
    rrnet::check_params(net->spec, t);
    net->theta = std::move(t);
    return RRNET_OK;
  });
}

RRNET_API rrnet_status rrnet_network_init(rrnet_network* net, uint64_t seed) {
  RRNET_REQUIRE(net);
  return guarded([&] {
    net->theta = rrnet::glorot_init(net->spec, seed);
    return RRNET_OK;
  });
}

RRNET_API rrnet_status rrnet_network_predict(const rrnet_network* net, const double* x, size_t n, size_t p,
                                             double* out) {
  RRNET_REQUIRE(net);
  RRNET_REQUIRE(x);
  RRNET_REQUIRE(out);
  return guarded([&] {
    if (p != net->spec.input_dim)
      throw rrnet::ShapeError(0, "input has " + std::to_string(p) + " features, network expects " +
                                     std::to_string(net->spec.input_dim));
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const Eigen::MatrixXd xs = Eigen::Map<const RowMajor>(x, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    const Eigen::VectorXd y = rrnet::predict(net->spec, net->theta, xs);
    for (Eigen::Index i = 0; i < y.size(); ++i) out[i] = y[i];
    return RRNET_OK;
  });
}

RRNET_API rrnet_status rrnet_dataset_create(const double* x, const double* y, size_t n, size_t p,
                                            rrnet_dataset** out) {
  RRNET_REQUIRE(x);
  RRNET_REQUIRE(y);
  RRNET_REQUIRE(out);
  return guarded([&] {
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    auto d = std::make_unique<rrnet_dataset>();
    d->data.x = Eigen::Map<const RowMajor>(x, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    d->data.y = Eigen::Map<const Eigen::VectorXd>(y, static_cast<Eigen::Index>(n));
    d->data.contaminated.assign(n, false);
    d->data.validate();
    *out = d.release();
    return RRNET_OK;
  });
}

RRNET_API rrnet_status rrnet_dataset_load_csv(const char* path, const char* response, const char* scale,
                                              rrnet_dataset** out) {
  RRNET_REQUIRE(path);
  RRNET_REQUIRE(out);
  return guarded([&] {
    const rrnet::ScalePolicy policy = rrnet::parse_scale_policy(scale ? scale : "covariates");
    rrnet::LoadedCsv csv = rrnet::load_csv(path, response ? response : "", policy);
    *out = new rrnet_dataset{std::move(csv.data)};
    return RRNET_OK;
  });
}

RRNET_API rrnet_status rrnet_dataset_generate(int phi, double delta, uint64_t seed, rrnet_dataset** train,
                                              rrnet_dataset** test) {
  RRNET_REQUIRE(train);
  return guarded([&] {
    auto [tr, te] = rrnet::gen_dataset(rrnet::DgpSpec::defaults(phi, delta, seed));
    auto a = std::make_unique<rrnet_dataset>(rrnet_dataset{std::move(tr)});
    if (test) *test = new rrnet_dataset{std::move(te)};
    *train = a.release();
    return RRNET_OK;
  });
}

RRNET_API void rrnet_dataset_free(rrnet_dataset* data) { delete data; }

RRNET_API rrnet_status rrnet_dataset_shape(const rrnet_dataset* data, size_t* n, size_t* p) {
  RRNET_REQUIRE(data);
  if (n) *n = data->data.size();
  if (p) *p = data->data.dim();
  return RRNET_OK;
}

RRNET_API rrnet_status rrnet_dataset_copy(const rrnet_dataset* data, double* x, double* y) {
  RRNET_REQUIRE(data);
  const auto& d = data->data;
  if (x)
    for (Eigen::Index i = 0; i < d.x.rows(); ++i)
      for (Eigen::Index j = 0; j < d.x.cols(); ++j) x[i * d.x.cols() + j] = d.x(i, j);
  if (y)
    for (Eigen::Index i = 0; i < d.y.size(); ++i) y[i] = d.y[i];
  return RRNET_OK;
}

RRNET_API rrnet_status rrnet_fit_dpd(rrnet_network* net, const rrnet_dataset* data, double beta, const char* model,
                                     const rrnet_config* settings, rrnet_fit** out) {
  RRNET_REQUIRE(net);
  RRNET_REQUIRE(data);
  RRNET_REQUIRE(out);
  return guarded([&] {
    check_fit_inputs(net, data);
    rrnet::DpdConfig cfg;
    cfg.beta = beta;
    cfg.model = rrnet::ErrorModel::parse(model ? model : "gaussian");
    if (settings) cfg.sigma_floor = settings->cfg.get_double("sigma_floor", cfg.sigma_floor);
    cfg.validate();
    auto f = std::make_unique<rrnet_fit>();
    f->result = rrnet::fit(cfg, net->spec, data->data, settings_of(settings));
    net->theta = f->result.theta;
    *out = f.release();
    return RRNET_OK;
  });
}

RRNET_API rrnet_status rrnet_fit_competitor(rrnet_network* net, const rrnet_dataset* data, const char* loss,
                                            const rrnet_config* settings, rrnet_fit** out) {
  RRNET_REQUIRE(net);
  RRNET_REQUIRE(data);
  RRNET_REQUIRE(loss);
  RRNET_REQUIRE(out);
  return guarded([&] {
    check_fit_inputs(net, data);
    auto f = std::make_unique<rrnet_fit>();
    f->result = rrnet::fit_competitor(rrnet::CompetitorLoss::parse(loss), net->spec, data->data, settings_of(settings));
    net->theta = f->result.theta;
    *out = f.release();
    return RRNET_OK;
  });
}

RRNET_API void rrnet_fit_free(rrnet_fit* fit) { delete fit; }

RRNET_API rrnet_status rrnet_fit_sigma(const rrnet_fit* fit, double* out) {
  RRNET_REQUIRE(fit);
  RRNET_REQUIRE(out);
  *out = fit->result.sigma;
  return RRNET_OK;
}

RRNET_API rrnet_status rrnet_fit_outer_iters(const rrnet_fit* fit, size_t* out) {
  RRNET_REQUIRE(fit);
  RRNET_REQUIRE(out);
  *out = fit->result.outer_iters;
  return RRNET_OK;
}

RRNET_API rrnet_status rrnet_fit_descent_violations(const rrnet_fit* fit, size_t* out) {
  RRNET_REQUIRE(fit);
  RRNET_REQUIRE(out);
  *out = fit->result.descent_violations;
  return RRNET_OK;
}

RRNET_API rrnet_status rrnet_fit_loss_trace(const rrnet_fit* fit, double* out, size_t cap, size_t* len) {
  RRNET_REQUIRE(fit);
  const auto& tr = fit->result.loss_trace;
  if (len) *len = tr.size();
  if (out)
    for (size_t k = 0; k < tr.size() && k < cap; ++k) out[k] = tr[k];
  return RRNET_OK;
}

RRNET_API rrnet_status rrnet_dpd_loss(const rrnet_network* net, const rrnet_dataset* data, double beta,
                                      const char* model, double sigma, double* out) {
  RRNET_REQUIRE(net);
  RRNET_REQUIRE(data);
  RRNET_REQUIRE(out);
  return guarded([&] {
    check_fit_inputs(net, data);
    rrnet::DpdConfig cfg;
    cfg.beta = beta;
    cfg.model = rrnet::ErrorModel::parse(model ? model : "gaussian");
    cfg.validate();
    *out = rrnet::loss(cfg, net->spec, net->theta, sigma, data->data);
    return RRNET_OK;
  });
}

RRNET_API rrnet_status rrnet_c_constant(const char* model, int i, int j, double beta, double* out) {
  RRNET_REQUIRE(out);
  return guarded([&] {
    if (i < 0 || j < 0) throw rrnet::InvalidArgument("C-constant indices must be non-negative");
    *out = rrnet::ErrorModel::parse(model ? model : "gaussian").c_constant(i, j, beta);
    return RRNET_OK;
  });
}

}  // extern "C"
