#include "adaptode/io.hpp"

#include "adaptode/error.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string_view>
#include <vector>

namespace adaptode::io {

using nlohmann::json;

std::string format_double(double v)
{
    char buf[32];
    const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf, static_cast<std::size_t>(n));
}

namespace {

std::vector<std::string_view> split(std::string_view line, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

[[noreturn]] void schema_fail(const std::string& source, std::size_t line, const std::string& what)
{
    throw SchemaError(source + ":" + std::to_string(line) + ": " + what);
}

double parse_double(std::string_view s, const std::string& source, std::size_t line)
{
    s = trim(s);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        schema_fail(source, line, "invalid number '" + std::string(s) + "'");
    return v;
}

long long parse_int(std::string_view s, const std::string& source, std::size_t line)
{
    s = trim(s);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        schema_fail(source, line, "invalid integer '" + std::string(s) + "'");
    return v;
}

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        throw IoError("cannot open '" + path.string() + "' for writing");
    return os;
}

std::ifstream open_in(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw IoError("cannot open '" + path.string() + "' for reading");
    return is;
}

void finish(std::ofstream& os, const std::filesystem::path& path)
{
    os.flush();
    if (!os)
        throw IoError("failed writing '" + path.string() + "'");
}

} // namespace

void write_trajectory_csv(std::ostream& os, const Trajectory& t)
{
    os << "# generator=" << t.meta.generator << '\n';
    os << "# dt_phys=" << format_double(t.dt_phys) << '\n';
    os << "# x0=" << format_double(t.x0.x1) << ',' << format_double(t.x0.x2) << ',' << format_double(t.x0.x3)
       << '\n';
    os << "# rtol=" << format_double(t.meta.tol.rtol) << '\n';
    os << "# atol=" << format_double(t.meta.tol.atol) << '\n';
    os << "# sigma=" << format_double(t.meta.params.sigma) << '\n';
    os << "# rho=" << format_double(t.meta.params.rho) << '\n';
    os << "# beta=" << format_double(t.meta.params.beta) << '\n';
    os << "i,x1,x2,x3\n";
    for (std::size_t i = 0; i < t.points.size(); ++i) {
        const StatePoint& p = t.points[i];
        os << i << ',' << format_double(p.x1) << ',' << format_double(p.x2) << ',' << format_double(p.x3) << '\n';
    }
}

Trajectory read_trajectory_csv(std::istream& is, const std::string& source)
{
    Trajectory t;
    std::map<std::string, std::string, std::less<>> meta;
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string_view view = trim(line);
        if (view.empty())
            continue;
        if (view.front() == '#') {
            if (header)
                schema_fail(source, lineno, "metadata line after the header");
            const std::string_view body = trim(view.substr(1));
            const std::size_t eq = body.find('=');
            if (eq == std::string_view::npos)
                continue; // free-form comment
            meta[std::string(trim(body.substr(0, eq)))] = std::string(trim(body.substr(eq + 1)));
            continue;
        }
        if (!header) {
            if (view != "i,x1,x2,x3")
                schema_fail(source, lineno, "expected header 'i,x1,x2,x3'");
            header = true;
            continue;
        }
        const auto fields = split(view, ',');
        if (fields.size() != 4)
            schema_fail(source, lineno, "expected 4 fields, got " + std::to_string(fields.size()));
        const long long idx = parse_int(fields[0], source, lineno);
        if (idx != static_cast<long long>(t.points.size()))
            schema_fail(source, lineno, "row index " + std::to_string(idx) + " out of sequence");
        t.points.push_back({parse_double(fields[1], source, lineno), parse_double(fields[2], source, lineno),
                            parse_double(fields[3], source, lineno)});
    }
    if (!header)
        schema_fail(source, lineno, "missing header 'i,x1,x2,x3'");

    auto number = [&](const char* key, double fallback) {
        const auto it = meta.find(key);
        return it == meta.end() ? fallback : parse_double(it->second, source, 0);
    };
    t.dt_phys = number("dt_phys", t.dt_phys);
    t.meta.tol.rtol = number("rtol", t.meta.tol.rtol);
    t.meta.tol.atol = number("atol", t.meta.tol.atol);
    t.meta.params.sigma = number("sigma", t.meta.params.sigma);
    t.meta.params.rho = number("rho", t.meta.params.rho);
    t.meta.params.beta = number("beta", t.meta.params.beta);
    if (const auto it = meta.find("generator"); it != meta.end())
        t.meta.generator = it->second;
    if (const auto it = meta.find("x0"); it != meta.end()) {
        const auto parts = split(it->second, ',');
        if (parts.size() != 3)
            throw SchemaError(source + ": metadata x0 must have three components");
        t.x0 = {parse_double(parts[0], source, 0), parse_double(parts[1], source, 0),
                parse_double(parts[2], source, 0)};
    } else if (!t.points.empty()) {
        t.x0 = t.points.front();
    }
    return t;
}

void save_trajectory(const std::filesystem::path& path, const Trajectory& t)
{
    auto os = open_out(path);
    write_trajectory_csv(os, t);
    finish(os, path);
}

Trajectory load_trajectory(const std::filesystem::path& path)
{
    auto is = open_in(path);
    return read_trajectory_csv(is, path.string());
}

void write_train_log_csv(std::ostream& os, std::span<const EpochRecord> log)
{
    os << "epoch,loss,accepted_fraction,mean_new_steps,min_new_steps,max_new_steps\n";
    for (const EpochRecord& r : log) {
        os << r.epoch << ',' << format_double(r.loss) << ',' << format_double(r.accepted_fraction) << ',';
        if (r.new_steps)
            os << format_double(r.new_steps->mean) << ',' << format_double(r.new_steps->min) << ','
               << format_double(r.new_steps->max);
        else
            os << ",,";
        os << '\n';
    }
}

void save_train_log(const std::filesystem::path& path, std::span<const EpochRecord> log)
{
    auto os = open_out(path);
    write_train_log_csv(os, log);
    finish(os, path);
}

void write_report_csv(std::ostream& os, const EvalReport& r, std::size_t begin, std::size_t end)
{
    const auto& pts = r.generated.points;
    end = std::min(end, pts.size());
    os << "i,x1,x2,x3,mse,oracle_mse,n_steps\n";
    for (std::size_t i = begin; i < end; ++i) {
        const StatePoint& p = pts[i];
        os << i << ',' << format_double(p.x1) << ',' << format_double(p.x2) << ',' << format_double(p.x3) << ','
           << format_double(r.mse[i]) << ',';
        if (i > 0)
            os << format_double(r.oracle_mse[i - 1]);
        os << ',';
        if (i > 0 && !r.n_steps.empty())
            os << r.n_steps[i - 1];
        os << '\n';
    }
}

void save_report(const std::filesystem::path& path, const EvalReport& r, std::size_t begin, std::size_t end)
{
    auto os = open_out(path);
    write_report_csv(os, r, begin, end);
    finish(os, path);
}

std::string checkpoint_to_json(const MlpParams& p)
{
    json doc;
    doc["dims"] = p.dims();
    doc["activation"] = "relu";
    json layers = json::array();
    for (std::size_t l = 0; l < p.layer_count(); ++l) {
        const auto w = p.weights(l);
        const auto nin = static_cast<std::size_t>(p.fan_in(l));
        json rows = json::array();
        for (int j = 0; j < p.fan_out(l); ++j) {
            const auto row = w.subspan(static_cast<std::size_t>(j) * nin, nin);
            rows.push_back(std::vector<double>(row.begin(), row.end()));
        }
        const auto b = p.bias(l);
        layers.push_back({{"w", std::move(rows)}, {"b", std::vector<double>(b.begin(), b.end())}});
    }
    doc["layers"] = std::move(layers);
    return doc.dump(1) + "\n";
}

MlpParams checkpoint_from_json(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("checkpoint is not valid JSON: ") + e.what());
    }
    auto require = [](bool ok, const std::string& what) {
        if (!ok)
            throw SchemaError("checkpoint: " + what);
    };
    require(doc.is_object(), "top level must be an object");
    require(doc.contains("dims") && doc["dims"].is_array(), "missing array 'dims'");
    require(doc.contains("activation") && doc["activation"] == "relu", "'activation' must be \"relu\"");
    require(doc.contains("layers") && doc["layers"].is_array(), "missing array 'layers'");

    std::vector<int> dims;
    for (const auto& d : doc["dims"]) {
        require(d.is_number_integer(), "'dims' entries must be integers");
        dims.push_back(d.get<int>());
    }
    MlpParams p = [&] {
        try {
            return MlpParams(dims);
        } catch (const InvalidArgument& e) {
            throw SchemaError(std::string("checkpoint: ") + e.what());
        }
    }();
    const auto& layers = doc["layers"];
    require(layers.size() == p.layer_count(), "'layers' count does not match 'dims'");
    auto number = [&](const json& v) {
        require(v.is_number(), "parameter entries must be numbers");
        const double x = v.get<double>();
        require(std::isfinite(x), "parameter entries must be finite");
        return x;
    };
    for (std::size_t l = 0; l < p.layer_count(); ++l) {
        const auto& layer = layers[l];
        require(layer.is_object() && layer.contains("w") && layer.contains("b"),
                "layer " + std::to_string(l) + " needs 'w' and 'b'");
        const auto& w = layer["w"];
        const auto& b = layer["b"];
        const auto nout = static_cast<std::size_t>(p.fan_out(l));
        const auto nin = static_cast<std::size_t>(p.fan_in(l));
        require(w.is_array() && w.size() == nout, "layer " + std::to_string(l) + " 'w' must have " +
                                                      std::to_string(nout) + " rows");
        require(b.is_array() && b.size() == nout, "layer " + std::to_string(l) + " 'b' must have " +
                                                      std::to_string(nout) + " entries");
        auto dst_w = p.weights(l);
        for (std::size_t j = 0; j < nout; ++j) {
            require(w[j].is_array() && w[j].size() == nin, "layer " + std::to_string(l) + " 'w' row " +
                                                               std::to_string(j) + " must have " +
                                                               std::to_string(nin) + " entries");
            for (std::size_t k = 0; k < nin; ++k)
                dst_w[j * nin + k] = number(w[j][k]);
        }
        auto dst_b = p.bias(l);
        for (std::size_t j = 0; j < nout; ++j)
            dst_b[j] = number(b[j]);
    }
    return p;
}

void save_checkpoint(const std::filesystem::path& path, const MlpParams& p)
{
    write_file(path, checkpoint_to_json(p));
}

MlpParams load_checkpoint(const std::filesystem::path& path) { return checkpoint_from_json(read_file(path)); }

std::string read_file(const std::filesystem::path& path)
{
    auto is = open_in(path);
    std::ostringstream ss;
    ss << is.rdbuf();
    if (is.bad())
        throw IoError("failed reading '" + path.string() + "'");
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents)
{
    auto os = open_out(path);
    os << contents;
    finish(os, path);
}

} // namespace adaptode::io
