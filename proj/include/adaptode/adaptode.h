/* C interface of the adaptode library.
 *
 * Every object is an opaque handle owned by the caller and released with its
 * matching *_free function (passing NULL is allowed). Fallible functions
 * return an adaptode_status; on failure, adaptode_last_error() returns a
 * message describing the most recent error on the calling thread. Output
 * handles are only written on success.
 */
#ifndef ADAPTODE_H
#define ADAPTODE_H

#include <stddef.h>
#include <stdint.h>

#if defined(ADAPTODE_BUILDING_LIBRARY)
#define ADAPTODE_API __attribute__((visibility("default")))
#else
#define ADAPTODE_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as process exit codes for the command line tool. */
typedef enum adaptode_status {
    ADAPTODE_OK = 0,
    ADAPTODE_ERR_INTERNAL = 1,
    ADAPTODE_ERR_INVALID_ARGUMENT = 2,
    ADAPTODE_ERR_NUMERIC = 3,
    ADAPTODE_ERR_IO = 4,
    ADAPTODE_ERR_SCHEMA = 5
} adaptode_status;

typedef enum adaptode_train_mode {
    ADAPTODE_MODE_BLACKBOX = 0,
    ADAPTODE_MODE_FEHLBERG = 1
} adaptode_train_mode;

typedef struct adaptode_trajectory adaptode_trajectory;
typedef struct adaptode_model adaptode_model;
typedef struct adaptode_train_log adaptode_train_log;
typedef struct adaptode_report adaptode_report;

typedef struct adaptode_dataset_config {
    double sigma, rho, beta;
    double x0[3];
    size_t n;
    double dt_phys;
    double rtol, atol;
} adaptode_dataset_config;

typedef struct adaptode_solver_config {
    double eps;
    double safety;
    double h_clip;
} adaptode_solver_config;

typedef struct adaptode_lbfgs_config {
    double lr;
    int max_iter;
    int max_eval;
    double tol_grad;
    double tol_change;
    int history;
    double c1, c2;
} adaptode_lbfgs_config;

typedef struct adaptode_train_config {
    adaptode_train_mode mode;
    int epochs;
    uint64_t seed;
    size_t mini_batch; /* 0: full batch */
    adaptode_solver_config solver;
    adaptode_lbfgs_config optimizer;
} adaptode_train_config;

typedef struct adaptode_epoch_record {
    int epoch;
    double loss;
    double accepted_fraction;
    int has_new_steps; /* 0 when no example was rejected */
    double mean_new_steps, min_new_steps, max_new_steps;
    int optimizer_evaluations;
    int line_search_failed;
} adaptode_epoch_record;

typedef void (*adaptode_epoch_callback)(const adaptode_epoch_record* record, void* user);

ADAPTODE_API const char* adaptode_version(void);
ADAPTODE_API const char* adaptode_last_error(void);
ADAPTODE_API const char* adaptode_status_name(adaptode_status status);

/* Configuration defaults. */
ADAPTODE_API void adaptode_dataset_config_default(adaptode_dataset_config* cfg);
ADAPTODE_API void adaptode_solver_config_default(adaptode_solver_config* cfg);
ADAPTODE_API void adaptode_lbfgs_config_default(adaptode_lbfgs_config* cfg);
ADAPTODE_API void adaptode_train_config_default(adaptode_train_config* cfg);

/* Trajectories. */
ADAPTODE_API adaptode_status adaptode_generate_dataset(const adaptode_dataset_config* cfg,
                                                       adaptode_trajectory** out);
ADAPTODE_API adaptode_status adaptode_trajectory_load(const char* path, adaptode_trajectory** out);
ADAPTODE_API adaptode_status adaptode_trajectory_save(const adaptode_trajectory* t, const char* path);
ADAPTODE_API size_t adaptode_trajectory_size(const adaptode_trajectory* t);
ADAPTODE_API adaptode_status adaptode_trajectory_point(const adaptode_trajectory* t, size_t i, double out[3]);
ADAPTODE_API double adaptode_trajectory_dt(const adaptode_trajectory* t);
ADAPTODE_API void adaptode_trajectory_free(adaptode_trajectory* t);

/* Models (the learned vector field). */
ADAPTODE_API adaptode_status adaptode_model_init(const int* dims, size_t n_dims, uint64_t seed,
                                                 adaptode_model** out);
ADAPTODE_API adaptode_status adaptode_model_zero(const int* dims, size_t n_dims, adaptode_model** out);
ADAPTODE_API adaptode_status adaptode_model_load(const char* path, adaptode_model** out);
ADAPTODE_API adaptode_status adaptode_model_save(const adaptode_model* m, const char* path);
ADAPTODE_API adaptode_status adaptode_model_forward(const adaptode_model* m, const double x[3], double out[3]);
ADAPTODE_API size_t adaptode_model_parameter_count(const adaptode_model* m);
ADAPTODE_API void adaptode_model_free(adaptode_model* m);

/* Training. `init` may be NULL to draw initial parameters from cfg->seed.
 * `callback` may be NULL; it is invoked after every epoch. */
ADAPTODE_API adaptode_status adaptode_train(const adaptode_trajectory* dataset, const adaptode_train_config* cfg,
                                            const adaptode_model* init, adaptode_epoch_callback callback,
                                            void* user, adaptode_model** out_model, adaptode_train_log** out_log);
ADAPTODE_API size_t adaptode_train_log_size(const adaptode_train_log* log);
ADAPTODE_API adaptode_status adaptode_train_log_record(const adaptode_train_log* log, size_t i,
                                                       adaptode_epoch_record* out);
ADAPTODE_API adaptode_status adaptode_train_log_save(const adaptode_train_log* log, const char* path);
ADAPTODE_API void adaptode_train_log_free(adaptode_train_log* log);

/* Closed-loop generation of n steps from x0. The returned trajectory carries
 * the generation metadata (dt_phys, Lorenz parameters, tolerances) of
 * `like`, which may be NULL. When steps_out is non-NULL it must hold n
 * entries and receives the integration steps used for points 1..n. */
ADAPTODE_API adaptode_status adaptode_rollout(const adaptode_model* m, const double x0[3], size_t n,
                                              const adaptode_solver_config* cfg, const adaptode_trajectory* like,
                                              adaptode_trajectory** out, int32_t* steps_out);

/* Evaluation against a reference trajectory of the same length. `steps` may
 * be NULL; otherwise it holds size(generated) - 1 entries. */
ADAPTODE_API adaptode_status adaptode_evaluate(const adaptode_trajectory* generated,
                                               const adaptode_trajectory* reference, const int32_t* steps,
                                               adaptode_report** out);
/* Writes rows [begin, end) of the report; end is clipped to the length. */
ADAPTODE_API adaptode_status adaptode_report_save(const adaptode_report* r, const char* path, size_t begin,
                                                  size_t end);
ADAPTODE_API size_t adaptode_report_size(const adaptode_report* r);
ADAPTODE_API double adaptode_report_median_oracle_mse(const adaptode_report* r);
ADAPTODE_API double adaptode_report_median_mse(const adaptode_report* r);
ADAPTODE_API void adaptode_report_free(adaptode_report* r);

#ifdef __cplusplus
}
#endif

#endif /* ADAPTODE_H */
