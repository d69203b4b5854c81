// adaptode command line front end. Talks to the library through its C API only.

#include "adaptode/adaptode.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

struct Failure {
    int exit_code;
    std::string message;
};

int exit_code_for(adaptode_status s)
{
    switch (s) {
    case ADAPTODE_OK: return 0;
    case ADAPTODE_ERR_INVALID_ARGUMENT: return kExitUsage;
    case ADAPTODE_ERR_NUMERIC: return kExitNumeric;
    case ADAPTODE_ERR_IO:
    case ADAPTODE_ERR_SCHEMA: return kExitIo;
    case ADAPTODE_ERR_INTERNAL: return 1;
    }
    return 1;
}

void check(adaptode_status s)
{
    if (s != ADAPTODE_OK)
        throw Failure{exit_code_for(s), std::string(adaptode_status_name(s)) + ": " + adaptode_last_error()};
}

template <class T, void (*Free)(T*)>
struct Deleter {
    void operator()(T* p) const noexcept { Free(p); }
};
using TrajectoryPtr = std::unique_ptr<adaptode_trajectory, Deleter<adaptode_trajectory, adaptode_trajectory_free>>;
using ModelPtr = std::unique_ptr<adaptode_model, Deleter<adaptode_model, adaptode_model_free>>;
using LogPtr = std::unique_ptr<adaptode_train_log, Deleter<adaptode_train_log, adaptode_train_log_free>>;
using ReportPtr = std::unique_ptr<adaptode_report, Deleter<adaptode_report, adaptode_report_free>>;

TrajectoryPtr load_trajectory(const std::string& path)
{
    adaptode_trajectory* t = nullptr;
    check(adaptode_trajectory_load(path.c_str(), &t));
    return TrajectoryPtr(t);
}

ModelPtr load_model(const std::string& path)
{
    adaptode_model* m = nullptr;
    check(adaptode_model_load(path.c_str(), &m));
    return ModelPtr(m);
}

std::vector<double> parse_triple(const std::string& s)
{
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size())
            throw Failure{kExitUsage, "invalid number '" + item + "' in '" + s + "'"};
        v.push_back(x);
    }
    if (v.size() != 3)
        throw Failure{kExitUsage, "expected three comma-separated values, got '" + s + "'"};
    return v;
}

// FNV-1a 64 of a file's bytes, as 16 hex digits.
std::string file_digest(const fs::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw Failure{kExitIo, "cannot read '" + path.string() + "' for hashing"};
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 14];
    while (is.read(buf, sizeof buf) || is.gcount() > 0) {
        for (std::streamsize i = 0; i < is.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
    }
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

// One manifest per run, written next to the primary output. It records the
// resolved configuration and the command line needed to reproduce the run.
struct Manifest {
    std::string command;
    std::vector<std::string> argv;
    ordered_json config = ordered_json::object();
    std::uint64_t seed = 0;
    ordered_json inputs = ordered_json::object();
    ordered_json outputs = ordered_json::object();

    void input(const std::string& role, const std::string& path) { inputs[role] = path; }
    void output(const std::string& role, const std::string& path) { outputs[role] = path; }

    void write(const fs::path& primary) const
    {
        ordered_json doc;
        doc["command"] = command;
        doc["argv"] = argv;
        doc["library_version"] = adaptode_version();
        doc["seed"] = seed;
        doc["config"] = config;
        doc["inputs"] = inputs;
        doc["outputs"] = outputs;
        ordered_json hashes = ordered_json::object();
        for (const auto& group : {inputs, outputs})
            for (const auto& [role, path] : group.items())
                hashes[path.get<std::string>()] = "fnv1a64:" + file_digest(path.get<std::string>());
        doc["artifact_hashes"] = hashes;
        const fs::path path = primary.string() + ".manifest.json";
        std::ofstream os(path, std::ios::binary | std::ios::trunc);
        os << doc.dump(2) << '\n';
        if (!os)
            throw Failure{kExitIo, "cannot write manifest '" + path.string() + "'"};
    }
};

ordered_json json_number(double v)
{
    if (std::isfinite(v))
        return v;
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

ordered_json solver_json(const adaptode_solver_config& s)
{
    return {{"eps", s.eps}, {"safety", s.safety}, {"h0", 1.0}, {"h_clip", s.h_clip}, {"norm", "euclidean"}};
}

ordered_json lbfgs_json(const adaptode_lbfgs_config& o)
{
    return {{"lr", o.lr},         {"max_iter", o.max_iter},     {"max_eval", o.max_eval}, {"tol_grad", o.tol_grad},
            {"tol_change", o.tol_change}, {"history", o.history}, {"c1", o.c1},             {"c2", o.c2}};
}

struct GenDataArgs {
    std::string out;
    std::size_t n = 5000;
    double dt = 0.01;
    std::string x0 = "1,1,1";
    double rtol = 1e-8;
    double atol = 1e-10;
    double sigma = 10.0;
    double rho = 28.0;
    double beta = 8.0 / 3.0;
};

struct TrainArgs {
    std::string data;
    std::string out;
    std::string log;
    std::string init;
    std::string mode = "blackbox";
    double eps = 0.1;
    double safety = 0.9;
    double h_clip = 0.1;
    int epochs = 50;
    std::uint64_t seed = 0;
    std::size_t mini_batch = 0;
    int max_iter = 20;
    int max_eval = 25;
    int history = 100;
    bool quiet = false;
};

struct GenerateArgs {
    std::string model;
    std::string data;
    std::string out;
    std::size_t n = 0;
    double eps = 0.1;
    double safety = 0.9;
    double h_clip = 0.1;
};

struct EvalArgs {
    std::string data;
    std::string model;
    std::string generated;
    std::string steps;
    std::string out;
    double eps = 0.1;
    double safety = 0.9;
    double h_clip = 0.1;
    bool windows = true;
};

struct SweepArgs {
    std::string data;
    std::string out_dir;
    std::vector<double> eps{0.1, 0.05, 0.01};
    int epochs = 50;
    std::uint64_t seed = 0;
    bool quiet = false;
};

int run_gen_data(const GenDataArgs& a, const std::vector<std::string>& argv)
{
    adaptode_dataset_config cfg;
    adaptode_dataset_config_default(&cfg);
    const auto x0 = parse_triple(a.x0);
    cfg.x0[0] = x0[0];
    cfg.x0[1] = x0[1];
    cfg.x0[2] = x0[2];
    cfg.n = a.n;
    cfg.dt_phys = a.dt;
    cfg.rtol = a.rtol;
    cfg.atol = a.atol;
    cfg.sigma = a.sigma;
    cfg.rho = a.rho;
    cfg.beta = a.beta;

    adaptode_trajectory* raw = nullptr;
    check(adaptode_generate_dataset(&cfg, &raw));
    TrajectoryPtr t(raw);
    check(adaptode_trajectory_save(t.get(), a.out.c_str()));

    Manifest m;
    m.command = "gen-data";
    m.argv = argv;
    m.config = {{"n", cfg.n},         {"dt_phys", cfg.dt_phys}, {"x0", x0},         {"rtol", cfg.rtol},
                {"atol", cfg.atol},   {"sigma", cfg.sigma},     {"rho", cfg.rho},   {"beta", cfg.beta},
                {"generator", "dopri5"}};
    m.output("dataset", a.out);
    m.write(a.out);
    return 0;
}

void print_epoch(const adaptode_epoch_record* r, void* user)
{
    if (user != nullptr && *static_cast<const bool*>(user))
        return;
    if (r->has_new_steps)
        std::fprintf(stderr, "epoch %4d  loss %.6g  accepted %.4f  new steps mean %.3f [%.3f, %.3f]\n", r->epoch,
                     r->loss, r->accepted_fraction, r->mean_new_steps, r->min_new_steps, r->max_new_steps);
    else
        std::fprintf(stderr, "epoch %4d  loss %.6g  accepted %.4f\n", r->epoch, r->loss, r->accepted_fraction);
}

adaptode_train_config train_config(const TrainArgs& a)
{
    adaptode_train_config cfg;
    adaptode_train_config_default(&cfg);
    if (a.mode == "blackbox")
        cfg.mode = ADAPTODE_MODE_BLACKBOX;
    else if (a.mode == "fehlberg")
        cfg.mode = ADAPTODE_MODE_FEHLBERG;
    else
        throw Failure{kExitUsage, "--mode must be blackbox or fehlberg"};
    cfg.epochs = a.epochs;
    cfg.seed = a.seed;
    cfg.mini_batch = a.mini_batch;
    cfg.solver.eps = a.eps;
    cfg.solver.safety = a.safety;
    cfg.solver.h_clip = a.h_clip;
    cfg.optimizer.max_iter = a.max_iter;
    cfg.optimizer.max_eval = a.max_eval;
    cfg.optimizer.history = a.history;
    return cfg;
}

void train_one(const TrainArgs& a, const adaptode_train_config& cfg, const adaptode_trajectory* data,
               const std::vector<std::string>& argv, const std::string& command)
{
    ModelPtr init;
    if (!a.init.empty())
        init = load_model(a.init);
    adaptode_model* model_raw = nullptr;
    adaptode_train_log* log_raw = nullptr;
    bool quiet = a.quiet;
    check(adaptode_train(data, &cfg, init.get(), print_epoch, &quiet, &model_raw, &log_raw));
    ModelPtr model(model_raw);
    LogPtr log(log_raw);

    const std::string log_path = a.log.empty() ? a.out + ".log.csv" : a.log;
    check(adaptode_model_save(model.get(), a.out.c_str()));
    check(adaptode_train_log_save(log.get(), log_path.c_str()));

    Manifest m;
    m.command = command;
    m.argv = argv;
    m.seed = cfg.seed;
    m.config = {{"mode", a.mode},
                {"epochs", cfg.epochs},
                {"batch", cfg.mini_batch == 0 ? ordered_json("full") : ordered_json(cfg.mini_batch)},
                {"dims", {3, 50, 50, 3}},
                {"solver", solver_json(cfg.solver)},
                {"optimizer", lbfgs_json(cfg.optimizer)}};
    m.input("dataset", a.data);
    if (!a.init.empty())
        m.input("init", a.init);
    m.output("model", a.out);
    m.output("log", log_path);
    m.write(a.out);
}

int run_train(const TrainArgs& a, const std::vector<std::string>& argv)
{
    const adaptode_train_config cfg = train_config(a);
    TrajectoryPtr data = load_trajectory(a.data);
    train_one(a, cfg, data.get(), argv, "train");
    return 0;
}

adaptode_solver_config solver_config(double eps, double safety, double h_clip)
{
    adaptode_solver_config s;
    adaptode_solver_config_default(&s);
    s.eps = eps;
    s.safety = safety;
    s.h_clip = h_clip;
    return s;
}

struct Generated {
    TrajectoryPtr trajectory;
    std::vector<std::int32_t> steps;
};

Generated generate(const adaptode_model* model, const adaptode_trajectory* data, std::size_t n,
                   const adaptode_solver_config& solver)
{
    double x0[3];
    check(adaptode_trajectory_point(data, 0, x0));
    Generated g;
    g.steps.assign(n, 0);
    adaptode_trajectory* raw = nullptr;
    check(adaptode_rollout(model, x0, n, &solver, data, &raw, g.steps.data()));
    g.trajectory.reset(raw);
    return g;
}

void write_steps(const std::string& path, const std::vector<std::int32_t>& steps)
{
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    os << "i,n_steps\n";
    for (std::size_t i = 0; i < steps.size(); ++i)
        os << i + 1 << ',' << steps[i] << '\n';
    if (!os)
        throw Failure{kExitIo, "cannot write '" + path + "'"};
}

std::vector<std::int32_t> read_steps(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw Failure{kExitIo, "cannot open '" + path + "'"};
    std::string line;
    std::vector<std::int32_t> steps;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (lineno == 1) {
            if (line != "i,n_steps")
                throw Failure{kExitIo, path + ":1: expected header 'i,n_steps'"};
            continue;
        }
        if (line.empty())
            continue;
        const auto comma = line.find(',');
        try {
            if (comma == std::string::npos || std::stoul(line.substr(0, comma)) != steps.size() + 1)
                throw std::invalid_argument("index");
            steps.push_back(static_cast<std::int32_t>(std::stoi(line.substr(comma + 1))));
        } catch (const std::exception&) {
            throw Failure{kExitIo, path + ":" + std::to_string(lineno) + ": malformed row"};
        }
    }
    return steps;
}

int run_generate(const GenerateArgs& a, const std::vector<std::string>& argv)
{
    ModelPtr model = load_model(a.model);
    TrajectoryPtr data = load_trajectory(a.data);
    const std::size_t n = a.n > 0 ? a.n : adaptode_trajectory_size(data.get()) - 1;
    const adaptode_solver_config solver = solver_config(a.eps, a.safety, a.h_clip);
    Generated g = generate(model.get(), data.get(), n, solver);
    check(adaptode_trajectory_save(g.trajectory.get(), a.out.c_str()));
    const std::string steps_path = a.out + ".steps.csv";
    write_steps(steps_path, g.steps);

    Manifest m;
    m.command = "generate";
    m.argv = argv;
    m.config = {{"n", n}, {"solver", solver_json(solver)}, {"x0", "first point of the dataset"}};
    m.input("model", a.model);
    m.input("dataset", a.data);
    m.output("trajectory", a.out);
    m.output("steps", steps_path);
    m.write(a.out);
    return 0;
}

int run_eval(const EvalArgs& a, const std::vector<std::string>& argv)
{
    if (a.model.empty() == a.generated.empty())
        throw Failure{kExitUsage, "eval needs exactly one of --model or --generated"};
    TrajectoryPtr data = load_trajectory(a.data);
    const adaptode_solver_config solver = solver_config(a.eps, a.safety, a.h_clip);

    TrajectoryPtr generated;
    std::vector<std::int32_t> steps;
    if (!a.model.empty()) {
        ModelPtr model = load_model(a.model);
        Generated g = generate(model.get(), data.get(), adaptode_trajectory_size(data.get()) - 1, solver);
        generated = std::move(g.trajectory);
        steps = std::move(g.steps);
    } else {
        generated = load_trajectory(a.generated);
        if (!a.steps.empty()) {
            steps = read_steps(a.steps);
            if (steps.size() + 1 != adaptode_trajectory_size(generated.get()))
                throw Failure{kExitUsage, "--steps does not match the generated trajectory length"};
        }
    }

    adaptode_report* raw = nullptr;
    check(adaptode_evaluate(generated.get(), data.get(), steps.empty() ? nullptr : steps.data(), &raw));
    ReportPtr report(raw);
    check(adaptode_report_save(report.get(), a.out.c_str(), 0, SIZE_MAX));

    Manifest m;
    m.command = "eval";
    m.argv = argv;
    m.config = {{"solver", solver_json(solver)}};
    m.input("dataset", a.data);
    if (!a.model.empty())
        m.input("model", a.model);
    else
        m.input("generated", a.generated);
    if (!a.steps.empty())
        m.input("steps", a.steps);
    m.output("report", a.out);

    if (a.windows) {
        const std::size_t len = adaptode_report_size(report.get());
        const std::pair<std::size_t, std::size_t> windows[] = {{0, 600}, {600, 1200}, {2000, 2600}};
        for (const auto& [begin, end] : windows) {
            if (begin >= len)
                continue;
            const std::string path = a.out + ".window_" + std::to_string(begin) + "_" + std::to_string(end) + ".csv";
            check(adaptode_report_save(report.get(), path.c_str(), begin, end));
            m.output("window_" + std::to_string(begin) + "_" + std::to_string(end), path);
        }
    }
    m.config["median_mse"] = json_number(adaptode_report_median_mse(report.get()));
    m.config["median_oracle_mse"] = json_number(adaptode_report_median_oracle_mse(report.get()));
    m.write(a.out);
    return 0;
}

int run_sweep(const SweepArgs& a, const std::vector<std::string>& argv)
{
    TrajectoryPtr data = load_trajectory(a.data);
    std::error_code ec;
    fs::create_directories(a.out_dir, ec);
    if (ec)
        throw Failure{kExitIo, "cannot create '" + a.out_dir + "': " + ec.message()};
    for (double eps : a.eps) {
        TrainArgs t;
        t.data = a.data;
        t.eps = eps;
        t.epochs = a.epochs;
        t.seed = a.seed;
        t.quiet = a.quiet;
        std::ostringstream tag;
        tag << "eps_" << eps;
        t.out = (fs::path(a.out_dir) / (tag.str() + ".model.json")).string();
        t.log = (fs::path(a.out_dir) / (tag.str() + ".log.csv")).string();
        if (!a.quiet)
            std::fprintf(stderr, "== blackbox training with eps = %g\n", eps);
        train_one(t, train_config(t), data.get(), argv, "sweep");
    }
    return 0;
}

std::vector<std::string> read_manifest_argv(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw Failure{kExitIo, "cannot open manifest '" + path + "'"};
    ordered_json doc;
    try {
        doc = ordered_json::parse(is);
        auto argv = doc.at("argv").get<std::vector<std::string>>();
        if (argv.empty() || argv.front() == "replay")
            throw Failure{kExitIo, path + ": manifest does not describe a replayable command"};
        return argv;
    } catch (const nlohmann::json::exception& e) {
        throw Failure{kExitIo, path + ": invalid manifest: " + e.what()};
    }
}

int run(std::vector<std::string> args);

int run_replay(const std::string& manifest)
{
    return run(read_manifest_argv(manifest));
}

// args excludes the program name.
int run(std::vector<std::string> args)
{
    CLI::App app{"Neural ODE training on the Lorenz'63 attractor with the Fehlberg 3(2) adaptive solver"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(adaptode_version()));

    GenDataArgs gd;
    auto* gen_data = app.add_subcommand("gen-data", "Sample a Lorenz'63 trajectory with Dormand-Prince 5(4)");
    gen_data->add_option("--out", gd.out, "Output trajectory CSV")->required();
    gen_data->add_option("--n", gd.n, "Number of points")->capture_default_str()->check(CLI::Range(2, 100000000));
    gen_data->add_option("--dt", gd.dt, "Physical time between samples")->capture_default_str()->check(CLI::PositiveNumber);
    gen_data->add_option("--x0", gd.x0, "Initial condition x1,x2,x3")->capture_default_str();
    gen_data->add_option("--rtol", gd.rtol, "Relative tolerance")->capture_default_str()->check(CLI::PositiveNumber);
    gen_data->add_option("--atol", gd.atol, "Absolute tolerance")->capture_default_str()->check(CLI::PositiveNumber);
    gen_data->add_option("--sigma", gd.sigma)->capture_default_str()->check(CLI::PositiveNumber);
    gen_data->add_option("--rho", gd.rho)->capture_default_str()->check(CLI::PositiveNumber);
    gen_data->add_option("--beta", gd.beta)->capture_default_str()->check(CLI::PositiveNumber);

    TrainArgs tr;
    auto* train = app.add_subcommand("train", "Train the neural ODE on a trajectory");
    train->add_option("--data", tr.data, "Training trajectory CSV")->required();
    train->add_option("--out", tr.out, "Output checkpoint (JSON)")->required();
    train->add_option("--log", tr.log, "Epoch log CSV (default: <out>.log.csv)");
    train->add_option("--init", tr.init, "Start from this checkpoint instead of a seeded draw");
    train->add_option("--mode", tr.mode, "blackbox or fehlberg")
        ->capture_default_str()
        ->check(CLI::IsMember({"blackbox", "fehlberg"}));
    train->add_option("--eps", tr.eps, "Error-rate tolerance")->capture_default_str()->check(CLI::PositiveNumber);
    train->add_option("--safety", tr.safety, "Step-size safety factor")->capture_default_str();
    train->add_option("--h-clip", tr.h_clip, "Lower clip on the new step size")->capture_default_str();
    train->add_option("--epochs", tr.epochs, "Number of epochs")->capture_default_str()->check(CLI::PositiveNumber);
    train->add_option("--seed", tr.seed, "Initialization seed")->capture_default_str();
    train->add_option("--mini-batch", tr.mini_batch, "Mini-batch size (0: full batch)")->capture_default_str();
    train->add_option("--max-iter", tr.max_iter, "L-BFGS iterations per epoch")->capture_default_str();
    train->add_option("--max-eval", tr.max_eval, "L-BFGS evaluations per epoch")->capture_default_str();
    train->add_option("--history", tr.history, "L-BFGS history size")->capture_default_str();
    train->add_flag("--quiet", tr.quiet, "Do not print per-epoch progress");

    GenerateArgs ge;
    auto* generate_cmd = app.add_subcommand("generate", "Roll a trained model out from the dataset's first point");
    generate_cmd->add_option("--model", ge.model, "Checkpoint")->required();
    generate_cmd->add_option("--data", ge.data, "Dataset providing x0 and metadata")->required();
    generate_cmd->add_option("--out", ge.out, "Output trajectory CSV")->required();
    generate_cmd->add_option("--n", ge.n, "Steps to generate (default: dataset length - 1)");
    generate_cmd->add_option("--eps", ge.eps)->capture_default_str()->check(CLI::PositiveNumber);
    generate_cmd->add_option("--safety", ge.safety)->capture_default_str();
    generate_cmd->add_option("--h-clip", ge.h_clip)->capture_default_str();

    EvalArgs ev;
    auto* eval = app.add_subcommand("eval", "Write MSE, oracle MSE and step-count series against a dataset");
    eval->add_option("--data", ev.data, "Reference trajectory")->required();
    eval->add_option("--model", ev.model, "Checkpoint to roll out over the dataset length");
    eval->add_option("--generated", ev.generated, "Previously generated trajectory");
    eval->add_option("--steps", ev.steps, "Step counts written by generate (with --generated)");
    eval->add_option("--out", ev.out, "Report CSV")->required();
    eval->add_option("--eps", ev.eps)->capture_default_str()->check(CLI::PositiveNumber);
    eval->add_option("--safety", ev.safety)->capture_default_str();
    eval->add_option("--h-clip", ev.h_clip)->capture_default_str();
    bool no_windows = false;
    eval->add_flag("--no-windows", no_windows, "Skip the 0-600, 600-1200, 2000-2600 window files");

    SweepArgs sw;
    auto* sweep = app.add_subcommand("sweep", "Blackbox training for several tolerances");
    sweep->add_option("--data", sw.data, "Training trajectory CSV")->required();
    sweep->add_option("--out-dir", sw.out_dir, "Directory for checkpoints and logs")->required();
    sweep->add_option("--eps", sw.eps, "Tolerances")->capture_default_str()->delimiter(',');
    sweep->add_option("--epochs", sw.epochs)->capture_default_str()->check(CLI::PositiveNumber);
    sweep->add_option("--seed", sw.seed)->capture_default_str();
    sweep->add_flag("--quiet", sw.quiet);

    std::string manifest_path;
    auto* replay = app.add_subcommand("replay", "Rerun the command recorded in a manifest");
    replay->add_option("manifest", manifest_path, "Manifest written by an earlier run")->required();

    const std::vector<std::string> recorded = args;
    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*replay)
            return run_replay(manifest_path);
        if (*gen_data)
            return run_gen_data(gd, recorded);
        if (*train)
            return run_train(tr, recorded);
        if (*generate_cmd)
            return run_generate(ge, recorded);
        if (*eval) {
            ev.windows = !no_windows;
            return run_eval(ev, recorded);
        }
        if (*sweep)
            return run_sweep(sw, recorded);
    } catch (const Failure& f) {
        std::cerr << "adaptode: " << f.message << '\n';
        return f.exit_code;
    }
    return kExitUsage;
}

} // namespace

int main(int argc, char** argv)
{
    return run(std::vector<std::string>(argv + 1, argv + argc));
}
