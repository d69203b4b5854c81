#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "adaptode/adaptode.h"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;

const int kDims[] = {3, 50, 50, 3};

adaptode_trajectory* dataset(size_t n)
{
    adaptode_dataset_config cfg;
    adaptode_dataset_config_default(&cfg);
    cfg.n = n;
    adaptode_trajectory* t = nullptr;
    REQUIRE(adaptode_generate_dataset(&cfg, &t) == ADAPTODE_OK);
    return t;
}

struct TempDir {
    fs::path path = fs::temp_directory_path() / "adaptode_c_api_test";
    TempDir() { fs::create_directories(path); }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const char* name) const { return (path / name).string(); }
};

} // namespace

TEST_CASE("defaults")
{
    adaptode_dataset_config d;
    adaptode_dataset_config_default(&d);
    CHECK(d.sigma == 10.0);
    CHECK(d.rho == 28.0);
    CHECK(d.beta == 8.0 / 3.0);
    CHECK(d.n == 5000);
    CHECK(d.dt_phys == 0.01);
    CHECK(d.x0[0] == 1.0);
    CHECK(d.rtol == 1e-8);
    CHECK(d.atol == 1e-10);

    adaptode_train_config t;
    adaptode_train_config_default(&t);
    CHECK(t.mode == ADAPTODE_MODE_BLACKBOX);
    CHECK(t.solver.eps == 0.1);
    CHECK(t.solver.safety == 0.9);
    CHECK(t.solver.h_clip == 0.1);
    CHECK(t.optimizer.max_iter == 20);
    CHECK(t.optimizer.history == 100);
    CHECK(t.mini_batch == 0);
    CHECK(std::string(adaptode_status_name(ADAPTODE_ERR_SCHEMA)) == "schema error");
}

TEST_CASE("trajectories")
{
    adaptode_trajectory* t = dataset(20);
    CHECK(adaptode_trajectory_size(t) == 20);
    CHECK(adaptode_trajectory_dt(t) == 0.01);
    double x[3];
    REQUIRE(adaptode_trajectory_point(t, 0, x) == ADAPTODE_OK);
    CHECK(x[0] == 1.0);
    CHECK(adaptode_trajectory_point(t, 20, x) == ADAPTODE_ERR_INVALID_ARGUMENT);
    CHECK(std::string(adaptode_last_error()).size() > 0);

    TempDir dir;
    REQUIRE(adaptode_trajectory_save(t, dir.file("t.csv").c_str()) == ADAPTODE_OK);
    adaptode_trajectory* back = nullptr;
    REQUIRE(adaptode_trajectory_load(dir.file("t.csv").c_str(), &back) == ADAPTODE_OK);
    double y[3];
    for (size_t i = 0; i < 20; ++i) {
        adaptode_trajectory_point(t, i, x);
        adaptode_trajectory_point(back, i, y);
        CHECK(x[0] == y[0]);
        CHECK(x[1] == y[1]);
        CHECK(x[2] == y[2]);
    }
    adaptode_trajectory_free(back);
    adaptode_trajectory_free(t);

    adaptode_trajectory* missing = nullptr;
    CHECK(adaptode_trajectory_load(dir.file("none.csv").c_str(), &missing) == ADAPTODE_ERR_IO);
    CHECK(missing == nullptr);
    std::ofstream(dir.file("bad.csv")) << "i,x1,x2,x3\n0,1,2\n";
    CHECK(adaptode_trajectory_load(dir.file("bad.csv").c_str(), &missing) == ADAPTODE_ERR_SCHEMA);
    CHECK(std::string(adaptode_last_error()).find(":2:") != std::string::npos);

    adaptode_dataset_config cfg;
    adaptode_dataset_config_default(&cfg);
    cfg.n = 1;
    CHECK(adaptode_generate_dataset(&cfg, &missing) == ADAPTODE_ERR_INVALID_ARGUMENT);
    CHECK(adaptode_generate_dataset(nullptr, &missing) == ADAPTODE_ERR_INVALID_ARGUMENT);
    adaptode_trajectory_free(nullptr);
}

TEST_CASE("models")
{
    adaptode_model* m = nullptr;
    REQUIRE(adaptode_model_init(kDims, 4, 0, &m) == ADAPTODE_OK);
    CHECK(adaptode_model_parameter_count(m) == 2903);
    const double x[3] = {1, 2, 3};
    double f[3];
    REQUIRE(adaptode_model_forward(m, x, f) == ADAPTODE_OK);
    CHECK(std::isfinite(f[0]));

    TempDir dir;
    REQUIRE(adaptode_model_save(m, dir.file("m.json").c_str()) == ADAPTODE_OK);
    adaptode_model* back = nullptr;
    REQUIRE(adaptode_model_load(dir.file("m.json").c_str(), &back) == ADAPTODE_OK);
    double g[3];
    adaptode_model_forward(back, x, g);
    CHECK(f[0] == g[0]);
    CHECK(f[2] == g[2]);
    adaptode_model_free(back);
    adaptode_model_free(m);

    adaptode_model* z = nullptr;
    REQUIRE(adaptode_model_zero(kDims, 4, &z) == ADAPTODE_OK);
    adaptode_model_forward(z, x, f);
    CHECK(f[0] == 0.0);
    adaptode_model_free(z);

    const int bad_dims[] = {2, 5, 3};
    CHECK(adaptode_model_init(bad_dims, 3, 0, &z) == ADAPTODE_ERR_INVALID_ARGUMENT);
    std::ofstream(dir.file("bad.json")) << "{\"dims\": [3, 3]}";
    CHECK(adaptode_model_load(dir.file("bad.json").c_str(), &z) == ADAPTODE_ERR_SCHEMA);
}

namespace {
void count_epochs(const adaptode_epoch_record* r, void* user)
{
    auto* seen = static_cast<std::vector<int>*>(user);
    seen->push_back(r->epoch);
}
} // namespace

TEST_CASE("train, roll out and evaluate")
{
    adaptode_trajectory* t = dataset(200);
    adaptode_train_config cfg;
    adaptode_train_config_default(&cfg);
    cfg.epochs = 2;
    cfg.mode = ADAPTODE_MODE_FEHLBERG;
    std::vector<int> seen;
    adaptode_model* m = nullptr;
    adaptode_train_log* log = nullptr;
    REQUIRE(adaptode_train(t, &cfg, nullptr, count_epochs, &seen, &m, &log) == ADAPTODE_OK);
    CHECK(seen == std::vector<int>{0, 1});
    REQUIRE(adaptode_train_log_size(log) == 2);
    adaptode_epoch_record rec;
    REQUIRE(adaptode_train_log_record(log, 0, &rec) == ADAPTODE_OK);
    CHECK(rec.accepted_fraction < 0.05);
    CHECK(rec.has_new_steps == 1);
    CHECK(rec.mean_new_steps >= rec.min_new_steps);
    CHECK(adaptode_train_log_record(log, 2, &rec) == ADAPTODE_ERR_INVALID_ARGUMENT);

    adaptode_solver_config solver;
    adaptode_solver_config_default(&solver);
    double x0[3];
    adaptode_trajectory_point(t, 0, x0);
    std::vector<int32_t> steps(199);
    adaptode_trajectory* gen = nullptr;
    REQUIRE(adaptode_rollout(m, x0, 199, &solver, t, &gen, steps.data()) == ADAPTODE_OK);
    CHECK(adaptode_trajectory_size(gen) == 200);
    for (int32_t s : steps) {
        CHECK(s >= 1);
        CHECK(s <= 10);
    }

    adaptode_report* rep = nullptr;
    REQUIRE(adaptode_evaluate(gen, t, steps.data(), &rep) == ADAPTODE_OK);
    CHECK(adaptode_report_size(rep) == 200);
    CHECK(adaptode_report_median_mse(rep) >= 0.0);
    CHECK(adaptode_report_median_oracle_mse(rep) >= 0.0);
    TempDir dir;
    CHECK(adaptode_report_save(rep, dir.file("r.csv").c_str(), 0, 50) == ADAPTODE_OK);
    CHECK(adaptode_train_log_save(log, dir.file("log.csv").c_str()) == ADAPTODE_OK);
    adaptode_report_free(rep);

    adaptode_report* self = nullptr;
    REQUIRE(adaptode_evaluate(t, t, nullptr, &self) == ADAPTODE_OK);
    CHECK(adaptode_report_median_mse(self) == 0.0);
    adaptode_report_free(self);

    adaptode_trajectory* short_t = dataset(10);
    CHECK(adaptode_evaluate(short_t, t, nullptr, &self) == ADAPTODE_ERR_INVALID_ARGUMENT);
    adaptode_trajectory_free(short_t);

    adaptode_trajectory_free(gen);
    adaptode_model_free(m);
    adaptode_train_log_free(log);

    cfg.epochs = 0;
    CHECK(adaptode_train(t, &cfg, nullptr, nullptr, nullptr, &m, &log) == ADAPTODE_ERR_INVALID_ARGUMENT);
    adaptode_trajectory_free(t);
}

TEST_CASE("numeric failures surface as status codes")
{
    adaptode_trajectory* t = dataset(20);
    TempDir dir;
    std::ofstream(dir.file("huge.json"))
        << R"({"dims":[3,1,3],"activation":"relu","layers":[{"w":[[1e200,1e200,1e200]],"b":[0]},)"
        << R"({"w":[[1e200],[1e200],[1e200]],"b":[0,0,0]}]})";
    adaptode_model* m = nullptr;
    REQUIRE(adaptode_model_load(dir.file("huge.json").c_str(), &m) == ADAPTODE_OK);
    adaptode_solver_config solver;
    adaptode_solver_config_default(&solver);
    const double x0[3] = {1, 1, 1};
    adaptode_trajectory* out = nullptr;
    CHECK(adaptode_rollout(m, x0, 5, &solver, nullptr, &out, nullptr) == ADAPTODE_ERR_NUMERIC);
    CHECK(out == nullptr);
    adaptode_model_free(m);
    adaptode_trajectory_free(t);
}
