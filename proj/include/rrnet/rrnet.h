/* C interface to the rrnet library.
 *
 * All objects are opaque handles created by *_create / *_load functions and
 * released with the matching *_free (NULL is accepted). Every fallible call
 * returns an rrnet_status; on failure rrnet_last_error() describes the
 * problem for the calling thread until the next failing call.
 *
 * Matrices are passed row-major: row i of an n x p feature block starts at
 * x[i * p].
 */
#ifndef RRNET_H
#define RRNET_H

#include <stddef.h>
#include <stdint.h>

#if defined(RRNET_BUILDING_LIBRARY)
#define RRNET_API __attribute__((visibility("default")))
#else
#define RRNET_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rrnet_status {
  RRNET_OK = 0,
  RRNET_ERR_INVALID_ARGUMENT = 1,
  RRNET_ERR_IO = 2,
  RRNET_ERR_PARSE = 3,
  RRNET_ERR_SHAPE = 4,
  RRNET_ERR_NUMERIC = 5,
  RRNET_ERR_UNSUPPORTED = 6,
  RRNET_PARTIAL = 7, /* run finished but some cells failed; see failures.csv */
  RRNET_ERR_INTERNAL = 8
} rrnet_status;

typedef struct rrnet_config rrnet_config;
typedef struct rrnet_network rrnet_network;
typedef struct rrnet_dataset rrnet_dataset;
typedef struct rrnet_fit rrnet_fit;

RRNET_API const char* rrnet_version(void);
RRNET_API const char* rrnet_status_name(rrnet_status status);
/* Message of the last failing call on this thread; "" if none. */
RRNET_API const char* rrnet_last_error(void);

/* ---- batch runs -------------------------------------------------------- */

/* subcommand: train, benchmark, influence, breakdown or cv. */
RRNET_API rrnet_status rrnet_config_create(const char* subcommand, rrnet_config** out);
RRNET_API void rrnet_config_free(rrnet_config* cfg);
/* Unknown keys are rejected with the key named in the error. */
RRNET_API rrnet_status rrnet_config_set(rrnet_config* cfg, const char* key, const char* value);
/* Flat "key = value" file, '#' comments. */
RRNET_API rrnet_status rrnet_config_load_file(rrnet_config* cfg, const char* path);
/* Runs the subcommand and writes its outputs. RRNET_PARTIAL when some cells
 * failed; *n_failures (optional) receives their count. */
RRNET_API rrnet_status rrnet_run(const rrnet_config* cfg, size_t* n_failures);
/* Newline-separated list of the files written by the last rrnet_run on this
 * thread, followed by "warning: ..." lines. */
RRNET_API const char* rrnet_last_run_summary(void);

/* ---- networks ---------------------------------------------------------- */

/* descriptor: "p;K1,...,KL;activation", e.g. "1;10;sigmoid" or "2;;identity".
 * Parameters start at zero. */
RRNET_API rrnet_status rrnet_network_create(const char* descriptor, rrnet_network** out);
RRNET_API rrnet_status rrnet_network_load(const char* path, rrnet_network** out);
RRNET_API rrnet_status rrnet_network_save(const rrnet_network* net, const char* path);
RRNET_API void rrnet_network_free(rrnet_network* net);
RRNET_API rrnet_status rrnet_network_param_count(const rrnet_network* net, size_t* out);
RRNET_API rrnet_status rrnet_network_input_dim(const rrnet_network* net, size_t* out);
RRNET_API rrnet_status rrnet_network_get_params(const rrnet_network* net, double* out, size_t len);
RRNET_API rrnet_status rrnet_network_set_params(rrnet_network* net, const double* theta, size_t len);
/* Glorot-uniform weights, zero biases. */
RRNET_API rrnet_status rrnet_network_init(rrnet_network* net, uint64_t seed);
RRNET_API rrnet_status rrnet_network_predict(const rrnet_network* net, const double* x, size_t n, size_t p,
                                             double* out);

/* ---- data -------------------------------------------------------------- */

RRNET_API rrnet_status rrnet_dataset_create(const double* x, const double* y, size_t n, size_t p,
                                            rrnet_dataset** out);
/* response: column name, 1-based number, or NULL/"" for the last column.
 * scale: "none", "covariates" or "all". */
RRNET_API rrnet_status rrnet_dataset_load_csv(const char* path, const char* response, const char* scale,
                                              rrnet_dataset** out);
/* Benchmark target phi (1..7) with its default design. */
RRNET_API rrnet_status rrnet_dataset_generate(int phi, double delta, uint64_t seed, rrnet_dataset** train,
                                              rrnet_dataset** test);
RRNET_API void rrnet_dataset_free(rrnet_dataset* data);
RRNET_API rrnet_status rrnet_dataset_shape(const rrnet_dataset* data, size_t* n, size_t* p);
RRNET_API rrnet_status rrnet_dataset_copy(const rrnet_dataset* data, double* x, double* y);

/* ---- training ---------------------------------------------------------- */

/* Fits the network on `data` (the handle's parameters are replaced by the
 * fit). model: "gaussian", "laplace" or "logistic". settings may be NULL or
 * a config whose common keys (epochs, lr, seed, ...) are used. */
RRNET_API rrnet_status rrnet_fit_dpd(rrnet_network* net, const rrnet_dataset* data, double beta, const char* model,
                                     const rrnet_config* settings, rrnet_fit** out);
/* loss: lse, mae, lmls, huber, tukey, lts or lta. */
RRNET_API rrnet_status rrnet_fit_competitor(rrnet_network* net, const rrnet_dataset* data, const char* loss,
                                            const rrnet_config* settings, rrnet_fit** out);
RRNET_API void rrnet_fit_free(rrnet_fit* fit);
/* NaN for losses without a scale estimate. */
RRNET_API rrnet_status rrnet_fit_sigma(const rrnet_fit* fit, double* out);
RRNET_API rrnet_status rrnet_fit_outer_iters(const rrnet_fit* fit, size_t* out);
RRNET_API rrnet_status rrnet_fit_descent_violations(const rrnet_fit* fit, size_t* out);
/* Copies min(cap, length) entries; *len receives the full length. */
RRNET_API rrnet_status rrnet_fit_loss_trace(const rrnet_fit* fit, double* out, size_t cap, size_t* len);

/* ---- losses and constants ---------------------------------------------- */

RRNET_API rrnet_status rrnet_dpd_loss(const rrnet_network* net, const rrnet_dataset* data, double beta,
                                      const char* model, double sigma, double* out);
/* C_{i,j} = integral of s^i u(s)^j f(s)^(1+beta) ds for the standardized model. */
RRNET_API rrnet_status rrnet_c_constant(const char* model, int i, int j, double beta, double* out);

#ifdef __cplusplus
}
#endif

#endif /* RRNET_H */
