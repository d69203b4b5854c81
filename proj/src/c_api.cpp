#include "adaptode/adaptode.h"

#include "adaptode/error.hpp"
#include "adaptode/io.hpp"
#include "adaptode/lorenz.hpp"
#include "adaptode/metrics.hpp"
#include "adaptode/net.hpp"
#include "adaptode/training.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <memory>
#include <new>
#include <string>
#include <vector>

struct adaptode_trajectory {
    adaptode::Trajectory value;
};

struct adaptode_model {
    adaptode::MlpParams value;
};

struct adaptode_train_log {
    std::vector<adaptode::EpochRecord> records;
};

struct adaptode_report {
    adaptode::EvalReport value;
};

namespace {

thread_local std::string g_last_error;

adaptode_status fail(adaptode_status status, const char* what)
{
    g_last_error = what;
    return status;
}

// Runs f, translating library exceptions into status codes.
template <class F>
adaptode_status guarded(F&& f)
{
    try {
        f();
        g_last_error.clear();
        return ADAPTODE_OK;
    } catch (const adaptode::InvalidArgument& e) {
        return fail(ADAPTODE_ERR_INVALID_ARGUMENT, e.what());
    } catch (const adaptode::NumericError& e) {
        return fail(ADAPTODE_ERR_NUMERIC, e.what());
    } catch (const adaptode::IoError& e) {
        return fail(ADAPTODE_ERR_IO, e.what());
    } catch (const adaptode::SchemaError& e) {
        return fail(ADAPTODE_ERR_SCHEMA, e.what());
    } catch (const std::bad_alloc&) {
        return fail(ADAPTODE_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(ADAPTODE_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(ADAPTODE_ERR_INTERNAL, "unknown error");
    }
}

void require(bool ok, const char* what)
{
    if (!ok)
        throw adaptode::InvalidArgument(what);
}

adaptode::SolverConfig to_cpp(const adaptode_solver_config& c)
{
    adaptode::SolverConfig s;
    s.eps = c.eps;
    s.safety = c.safety;
    s.h_clip = c.h_clip;
    return s;
}

adaptode::LbfgsConfig to_cpp(const adaptode_lbfgs_config& c)
{
    adaptode::LbfgsConfig o;
    o.lr = c.lr;
    o.max_iter = c.max_iter;
    o.max_eval = c.max_eval;
    o.tol_grad = c.tol_grad;
    o.tol_change = c.tol_change;
    o.history = c.history;
    o.c1 = c.c1;
    o.c2 = c.c2;
    return o;
}

adaptode_epoch_record to_c(const adaptode::EpochRecord& r)
{
    adaptode_epoch_record out{};
    out.epoch = r.epoch;
    out.loss = r.loss;
    out.accepted_fraction = r.accepted_fraction;
    out.has_new_steps = r.new_steps.has_value() ? 1 : 0;
    if (r.new_steps) {
        out.mean_new_steps = r.new_steps->mean;
        out.min_new_steps = r.new_steps->min;
        out.max_new_steps = r.new_steps->max;
    }
    out.optimizer_evaluations = r.optimizer.evaluations;
    out.line_search_failed = r.optimizer.line_search_failed ? 1 : 0;
    return out;
}

std::vector<int> dims_from(const int* dims, size_t n_dims)
{
    require(dims != nullptr || n_dims == 0, "dims is NULL");
    if (n_dims == 0)
        return adaptode::kDefaultDims;
    return std::vector<int>(dims, dims + n_dims);
}

} // namespace

extern "C" {

const char* adaptode_version(void) { return "0.1.0"; }

const char* adaptode_last_error(void) { return g_last_error.c_str(); }

const char* adaptode_status_name(adaptode_status status)
{
    switch (status) {
    case ADAPTODE_OK: return "ok";
    case ADAPTODE_ERR_INTERNAL: return "internal error";
    case ADAPTODE_ERR_INVALID_ARGUMENT: return "invalid argument";
    case ADAPTODE_ERR_NUMERIC: return "numeric failure";
    case ADAPTODE_ERR_IO: return "i/o error";
    case ADAPTODE_ERR_SCHEMA: return "schema error";
    }
    return "unknown status";
}

void adaptode_dataset_config_default(adaptode_dataset_config* cfg)
{
    if (!cfg)
        return;
    const adaptode::LorenzParams p;
    const adaptode::Tolerance tol;
    *cfg = adaptode_dataset_config{p.sigma, p.rho, p.beta, {1.0, 1.0, 1.0}, 5000, 0.01, tol.rtol, tol.atol};
}

void adaptode_solver_config_default(adaptode_solver_config* cfg)
{
    if (!cfg)
        return;
    const adaptode::SolverConfig s;
    *cfg = adaptode_solver_config{s.eps, s.safety, s.h_clip};
}

void adaptode_lbfgs_config_default(adaptode_lbfgs_config* cfg)
{
    if (!cfg)
        return;
    const adaptode::LbfgsConfig o;
    *cfg = adaptode_lbfgs_config{o.lr, o.max_iter, o.max_eval, o.tol_grad, o.tol_change, o.history, o.c1, o.c2};
}

void adaptode_train_config_default(adaptode_train_config* cfg)
{
    if (!cfg)
        return;
    const adaptode::TrainConfig t;
    cfg->mode = ADAPTODE_MODE_BLACKBOX;
    cfg->epochs = t.epochs;
    cfg->seed = t.seed;
    cfg->mini_batch = t.mini_batch;
    adaptode_solver_config_default(&cfg->solver);
    adaptode_lbfgs_config_default(&cfg->optimizer);
}

adaptode_status adaptode_generate_dataset(const adaptode_dataset_config* cfg, adaptode_trajectory** out)
{
    return guarded([&] {
        require(cfg && out, "NULL argument");
        const adaptode::LorenzParams p{cfg->sigma, cfg->rho, cfg->beta};
        const adaptode::Tolerance tol{cfg->rtol, cfg->atol};
        auto t = adaptode::generate_dataset(p, {cfg->x0[0], cfg->x0[1], cfg->x0[2]}, cfg->n, cfg->dt_phys, tol);
        *out = new adaptode_trajectory{std::move(t)};
    });
}

adaptode_status adaptode_trajectory_load(const char* path, adaptode_trajectory** out)
{
    return guarded([&] {
        require(path && out, "NULL argument");
        auto t = adaptode::io::load_trajectory(path);
        *out = new adaptode_trajectory{std::move(t)};
    });
}

adaptode_status adaptode_trajectory_save(const adaptode_trajectory* t, const char* path)
{
    return guarded([&] {
        require(t && path, "NULL argument");
        adaptode::io::save_trajectory(path, t->value);
    });
}

size_t adaptode_trajectory_size(const adaptode_trajectory* t) { return t ? t->value.size() : 0; }

adaptode_status adaptode_trajectory_point(const adaptode_trajectory* t, size_t i, double out[3])
{
    return guarded([&] {
        require(t && out, "NULL argument");
        require(i < t->value.size(), "trajectory index out of range");
        const auto& p = t->value.points[i];
        out[0] = p.x1;
        out[1] = p.x2;
        out[2] = p.x3;
    });
}

double adaptode_trajectory_dt(const adaptode_trajectory* t)
{
    return t ? t->value.dt_phys : std::numeric_limits<double>::quiet_NaN();
}

void adaptode_trajectory_free(adaptode_trajectory* t) { delete t; }

adaptode_status adaptode_model_init(const int* dims, size_t n_dims, uint64_t seed, adaptode_model** out)
{
    return guarded([&] {
        require(out != nullptr, "NULL argument");
        auto p = adaptode::mlp_init(dims_from(dims, n_dims), seed);
        *out = new adaptode_model{std::move(p)};
    });
}

adaptode_status adaptode_model_zero(const int* dims, size_t n_dims, adaptode_model** out)
{
    return guarded([&] {
        require(out != nullptr, "NULL argument");
        *out = new adaptode_model{adaptode::MlpParams(dims_from(dims, n_dims))};
    });
}

adaptode_status adaptode_model_load(const char* path, adaptode_model** out)
{
    return guarded([&] {
        require(path && out, "NULL argument");
        auto p = adaptode::io::load_checkpoint(path);
        *out = new adaptode_model{std::move(p)};
    });
}

adaptode_status adaptode_model_save(const adaptode_model* m, const char* path)
{
    return guarded([&] {
        require(m && path, "NULL argument");
        adaptode::io::save_checkpoint(path, m->value);
    });
}

adaptode_status adaptode_model_forward(const adaptode_model* m, const double x[3], double out[3])
{
    return guarded([&] {
        require(m && x && out, "NULL argument");
        const auto y = adaptode::mlp_forward(m->value, {x[0], x[1], x[2]});
        out[0] = y.x1;
        out[1] = y.x2;
        out[2] = y.x3;
    });
}

size_t adaptode_model_parameter_count(const adaptode_model* m) { return m ? m->value.size() : 0; }

void adaptode_model_free(adaptode_model* m) { delete m; }

adaptode_status adaptode_train(const adaptode_trajectory* dataset, const adaptode_train_config* cfg,
                               const adaptode_model* init, adaptode_epoch_callback callback, void* user,
                               adaptode_model** out_model, adaptode_train_log** out_log)
{
    return guarded([&] {
        require(dataset && cfg && out_model && out_log, "NULL argument");
        require(cfg->mode == ADAPTODE_MODE_BLACKBOX || cfg->mode == ADAPTODE_MODE_FEHLBERG, "unknown mode");
        adaptode::TrainConfig tc;
        tc.mode = cfg->mode == ADAPTODE_MODE_FEHLBERG ? adaptode::TrainMode::fehlberg : adaptode::TrainMode::blackbox;
        tc.epochs = cfg->epochs;
        tc.seed = cfg->seed;
        tc.mini_batch = cfg->mini_batch;
        tc.solver = to_cpp(cfg->solver);
        tc.optimizer = to_cpp(cfg->optimizer);
        if (init)
            tc.dims = init->value.dims();

        adaptode::EpochCallback cb;
        if (callback)
            cb = [&](const adaptode::EpochRecord& r) {
                const adaptode_epoch_record c = to_c(r);
                callback(&c, user);
            };
        auto result = adaptode::train(dataset->value, tc, init ? &init->value : nullptr, cb);
        auto model = std::make_unique<adaptode_model>(adaptode_model{std::move(result.model)});
        auto log = std::make_unique<adaptode_train_log>(adaptode_train_log{std::move(result.log)});
        *out_model = model.release();
        *out_log = log.release();
    });
}

size_t adaptode_train_log_size(const adaptode_train_log* log) { return log ? log->records.size() : 0; }

adaptode_status adaptode_train_log_record(const adaptode_train_log* log, size_t i, adaptode_epoch_record* out)
{
    return guarded([&] {
        require(log && out, "NULL argument");
        require(i < log->records.size(), "epoch index out of range");
        *out = to_c(log->records[i]);
    });
}

adaptode_status adaptode_train_log_save(const adaptode_train_log* log, const char* path)
{
    return guarded([&] {
        require(log && path, "NULL argument");
        adaptode::io::save_train_log(path, log->records);
    });
}

void adaptode_train_log_free(adaptode_train_log* log) { delete log; }

adaptode_status adaptode_rollout(const adaptode_model* m, const double x0[3], size_t n,
                                 const adaptode_solver_config* cfg, const adaptode_trajectory* like,
                                 adaptode_trajectory** out, int32_t* steps_out)
{
    return guarded([&] {
        require(m && x0 && cfg && out, "NULL argument");
        auto r = adaptode::rollout(m->value, {x0[0], x0[1], x0[2]}, n, to_cpp(*cfg));
        if (like) {
            r.trajectory.dt_phys = like->value.dt_phys;
            r.trajectory.meta.tol = like->value.meta.tol;
            r.trajectory.meta.params = like->value.meta.params;
        }
        if (steps_out)
            for (size_t i = 0; i < r.n_steps.size(); ++i)
                steps_out[i] = r.n_steps[i];
        *out = new adaptode_trajectory{std::move(r.trajectory)};
    });
}

adaptode_status adaptode_evaluate(const adaptode_trajectory* generated, const adaptode_trajectory* reference,
                                  const int32_t* steps, adaptode_report** out)
{
    return guarded([&] {
        require(generated && reference && out, "NULL argument");
        std::vector<int> s;
        if (steps && generated->value.size() > 0)
            s.assign(steps, steps + generated->value.size() - 1);
        auto r = adaptode::evaluate(generated->value, reference->value, s);
        *out = new adaptode_report{std::move(r)};
    });
}

adaptode_status adaptode_report_save(const adaptode_report* r, const char* path, size_t begin, size_t end)
{
    return guarded([&] {
        require(r && path, "NULL argument");
        adaptode::io::save_report(path, r->value, begin, end);
    });
}

size_t adaptode_report_size(const adaptode_report* r) { return r ? r->value.generated.size() : 0; }

double adaptode_report_median_oracle_mse(const adaptode_report* r)
{
    if (!r || r->value.oracle_mse.empty())
        return std::numeric_limits<double>::quiet_NaN();
    return adaptode::median(r->value.oracle_mse);
}

double adaptode_report_median_mse(const adaptode_report* r)
{
    if (!r || r->value.mse.empty())
        return std::numeric_limits<double>::quiet_NaN();
    return adaptode::median(r->value.mse);
}

void adaptode_report_free(adaptode_report* r) { delete r; }

} // extern "C"
