#ifndef CTRM_CLI_HPP
#define CTRM_CLI_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "ctrm/error.hpp"
#include "ctrm/experiment.hpp"
#include "ctrm/govern.hpp"
#include "ctrm/laplace.hpp"
#include "ctrm/limits.hpp"
#include "ctrm/model.hpp"
#include "ctrm/process.hpp"

namespace ctrm::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kInternal = 1, kConfig = 2, kIo = 3, kAccuracy = 4 };

// ---------------------------------------------------------------------------
// Run configuration

struct ModelConfig {
    std::string kind = "coupled";
    double beta = 0.5;
    double alpha = 1.0;
    double gamma = 1.0;
    double rate = 1.0;
};

struct XGrid {
    double min = 0.1;
    double max = 10.0;
    std::size_t count = 5;
    std::string spacing = "log";
};

struct RunConfig {
    ModelConfig model;
    std::string which = "ctrm";
    std::vector<double> t{1.0};
    std::optional<std::vector<double>> x;
    std::optional<XGrid> x_grid;
    std::vector<double> c{100.0};
    std::uint64_t n_samples = 1000;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::vector<std::string> methods{"closed_form"};
    int order = 14;
    double consistency_tol = 1e-3;
    double h = 1e-3;
    int h_levels = 4;
    std::vector<double> t_range{0.5, 2.0};
    std::vector<double> xi{0.5, 1.0, 2.0};
    double ks_threshold = 0.05;
    std::uint64_t quantile_points = 512;
    std::string format = "csv";
};

using nlohmann::json;

namespace detail {

template <class T>
void read_field(const json& j, const char* key, T& out) {
    if (j.contains(key)) {
        try {
            out = j.at(key).get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(std::string("config field '") + key + "': " + e.what());
        }
    }
}

inline void reject_unknown(const json& j, std::initializer_list<const char*> known, const char* where) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* k : known) {
            ok = ok || key == k;
        }
        if (!ok) {
            throw ConfigError(std::string("unknown config field '") + key + "' in " + where);
        }
    }
}

} // namespace detail

inline RunConfig config_from_json(const json& j) {
    if (!j.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    detail::reject_unknown(j,
                           {"model", "which", "t", "x", "x_grid", "c", "n_samples", "seed", "stream", "methods", "order",
                            "consistency_tol", "h", "h_levels", "t_range", "xi", "ks_threshold", "quantile_points",
                            "format"},
                           "config");
    RunConfig cfg;
    if (j.contains("model")) {
        const json& m = j.at("model");
        if (!m.is_object()) {
            throw ConfigError("config field 'model' must be an object");
        }
        detail::reject_unknown(m, {"kind", "beta", "alpha", "gamma", "rate"}, "model");
        detail::read_field(m, "kind", cfg.model.kind);
        detail::read_field(m, "beta", cfg.model.beta);
        detail::read_field(m, "alpha", cfg.model.alpha);
        detail::read_field(m, "gamma", cfg.model.gamma);
        detail::read_field(m, "rate", cfg.model.rate);
    }
    detail::read_field(j, "which", cfg.which);
    detail::read_field(j, "t", cfg.t);
    if (j.contains("x")) {
        cfg.x.emplace();
        detail::read_field(j, "x", *cfg.x);
    }
    if (j.contains("x_grid")) {
        const json& g = j.at("x_grid");
        if (!g.is_object()) {
            throw ConfigError("config field 'x_grid' must be an object");
        }
        detail::reject_unknown(g, {"min", "max", "count", "spacing"}, "x_grid");
        XGrid grid;
        detail::read_field(g, "min", grid.min);
        detail::read_field(g, "max", grid.max);
        detail::read_field(g, "count", grid.count);
        detail::read_field(g, "spacing", grid.spacing);
        cfg.x_grid = grid;
    }
    detail::read_field(j, "c", cfg.c);
    detail::read_field(j, "n_samples", cfg.n_samples);
    detail::read_field(j, "seed", cfg.seed);
    detail::read_field(j, "stream", cfg.stream);
    detail::read_field(j, "methods", cfg.methods);
    detail::read_field(j, "order", cfg.order);
    detail::read_field(j, "consistency_tol", cfg.consistency_tol);
    detail::read_field(j, "h", cfg.h);
    detail::read_field(j, "h_levels", cfg.h_levels);
    detail::read_field(j, "t_range", cfg.t_range);
    detail::read_field(j, "xi", cfg.xi);
    detail::read_field(j, "ks_threshold", cfg.ks_threshold);
    detail::read_field(j, "quantile_points", cfg.quantile_points);
    detail::read_field(j, "format", cfg.format);
    return cfg;
}

/// Every field, so the embedded copy in an output file reproduces the run.
inline json config_to_json(const RunConfig& cfg) {
    json j;
    j["model"] = {{"kind", cfg.model.kind},
                  {"beta", cfg.model.beta},
                  {"alpha", cfg.model.alpha},
                  {"gamma", cfg.model.gamma},
                  {"rate", cfg.model.rate}};
    j["which"] = cfg.which;
    j["t"] = cfg.t;
    if (cfg.x) {
        j["x"] = *cfg.x;
    }
    if (cfg.x_grid) {
        j["x_grid"] = {{"min", cfg.x_grid->min},
                       {"max", cfg.x_grid->max},
                       {"count", cfg.x_grid->count},
                       {"spacing", cfg.x_grid->spacing}};
    }
    j["c"] = cfg.c;
    j["n_samples"] = cfg.n_samples;
    j["seed"] = cfg.seed;
    j["stream"] = cfg.stream;
    j["methods"] = cfg.methods;
    j["order"] = cfg.order;
    j["consistency_tol"] = cfg.consistency_tol;
    j["h"] = cfg.h;
    j["h_levels"] = cfg.h_levels;
    j["t_range"] = cfg.t_range;
    j["xi"] = cfg.xi;
    j["ks_threshold"] = cfg.ks_threshold;
    j["quantile_points"] = cfg.quantile_points;
    j["format"] = cfg.format;
    return j;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Parses a JSON config, or recovers the embedded config of a CSV or JSON output file.
inline RunConfig parse_config_text(const std::string& text) {
    if (text.rfind('#', 0) == 0) {
        std::istringstream lines(text);
        std::string line;
        const std::string tag = "# config: ";
        while (std::getline(lines, line) && line.rfind('#', 0) == 0) {
            if (line.rfind(tag, 0) == 0) {
                return parse_config_text(line.substr(tag.size()));
            }
        }
        throw ConfigError("output file has no '# config:' header line");
    }
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (j.is_object() && j.contains("ctrm") && j.contains("config")) {
        return config_from_json(j.at("config"));
    }
    return config_from_json(j);
}

inline RunConfig load_config(const std::string& path) { return parse_config_text(read_file(path)); }

// ---------------------------------------------------------------------------
// Resolution of config fields into library types

inline ModelSpec build_model(const ModelConfig& m) {
    try {
        if (m.kind == "independent") {
            return IndependentStableFrechet{StableIndex(m.beta), FrechetShape(m.alpha)};
        }
        if (m.kind == "coupled") {
            return CoupledProductFrechet{StableIndex(m.beta), FrechetShape(m.gamma)};
        }
        if (m.kind == "exponential") {
            return ExponentialIndependent(m.rate, JumpLaw::StandardPareto);
        }
    } catch (const DomainError& e) {
        throw ConfigError(std::string("model parameters: ") + e.what());
    }
    throw ConfigError("unknown model kind '" + m.kind + "' (expected independent, coupled or exponential)");
}

inline Which parse_which(const std::string& s) {
    if (s == "ctrm") {
        return Which::Ctrm;
    }
    if (s == "octrm") {
        return Which::Octrm;
    }
    throw ConfigError("which must be 'ctrm' or 'octrm', got '" + s + "'");
}

inline Method parse_method(const std::string& s) {
    if (s == "inversion") {
        return Method::Inversion;
    }
    if (s == "closed_form") {
        return Method::ClosedForm;
    }
    if (s == "series") {
        return Method::Series;
    }
    throw ConfigError("unknown method '" + s + "' (expected inversion, closed_form or series)");
}

inline std::vector<double> resolve_x(const RunConfig& cfg) {
    if (cfg.x && cfg.x_grid) {
        throw ConfigError("give either x or x_grid, not both");
    }
    if (cfg.x) {
        if (cfg.x->empty()) {
            throw ConfigError("x must not be empty");
        }
        return *cfg.x;
    }
    const XGrid g = cfg.x_grid.value_or(XGrid{});
    if (g.count < 2) {
        throw ConfigError("x_grid.count must be >= 2");
    }
    try {
        if (g.spacing == "log") {
            return log_grid(g.min, g.max, g.count);
        }
        if (g.spacing == "lin") {
            return lin_grid(g.min, g.max, g.count);
        }
    } catch (const DomainError& e) {
        throw ConfigError(std::string("x_grid: ") + e.what());
    }
    throw ConfigError("x_grid.spacing must be 'lin' or 'log'");
}

inline InversionConfig inversion_config(const RunConfig& cfg) {
    InversionConfig inv{cfg.order, cfg.consistency_tol};
    try {
        inv.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    return inv;
}

inline void require_positive(const std::vector<double>& v, const char* name) {
    if (v.empty()) {
        throw ConfigError(std::string(name) + " must not be empty");
    }
    for (double e : v) {
        if (!(e > 0.0) || !std::isfinite(e)) {
            throw ConfigError(std::string(name) + " values must be positive and finite");
        }
    }
}

// ---------------------------------------------------------------------------
// Result tables and writers

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string render_csv(const Table& table, const std::string& command, const RunConfig& cfg) {
    std::string out;
    out += "# ctrm " + std::string(kVersion) + " " + command + "\n";
    out += "# config: " + config_to_json(cfg).dump() + "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        out += (i ? "," : "") + table.columns[i];
    }
    out += "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) {
                out += ",";
            }
            std::visit(
                [&](const auto& v) {
                    using V = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<V, double>) {
                        out += format_double(v);
                    } else if constexpr (std::is_same_v<V, std::int64_t>) {
                        out += std::to_string(v);
                    } else {
                        out += v;
                    }
                },
                row[i]);
        }
        out += "\n";
    }
    return out;
}

/// Non-finite doubles become strings ("inf", "-inf", "nan") so the document stays valid JSON.
inline std::string render_json(const Table& table, const std::string& command, const RunConfig& cfg) {
    json doc;
    doc["ctrm"] = kVersion;
    doc["command"] = command;
    doc["config"] = config_to_json(cfg);
    doc["columns"] = table.columns;
    json rows = json::array();
    for (const auto& row : table.rows) {
        json r = json::array();
        for (const auto& cell : row) {
            std::visit(
                [&](const auto& v) {
                    using V = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<V, double>) {
                        if (std::isfinite(v)) {
                            r.push_back(v);
                        } else {
                            r.push_back(format_double(v));
                        }
                    } else {
                        r.push_back(v);
                    }
                },
                cell);
        }
        rows.push_back(std::move(r));
    }
    doc["rows"] = std::move(rows);
    return doc.dump(2) + "\n";
}

inline std::string render(const Table& table, const std::string& command, const RunConfig& cfg) {
    if (cfg.format == "csv") {
        return render_csv(table, command, cfg);
    }
    if (cfg.format == "json") {
        return render_json(table, command, cfg);
    }
    throw ConfigError("format must be 'csv' or 'json', got '" + cfg.format + "'");
}

inline void write_output(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::fwrite(text.data(), 1, text.size(), stdout);
        std::fflush(stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out << text;
    if (!out.flush()) {
        throw IoError("write to '" + path + "' failed");
    }
}

// ---------------------------------------------------------------------------
// Commands

inline double single(const std::vector<double>& v, const char* name) {
    if (v.size() != 1) {
        throw ConfigError(std::string("this command needs exactly one value in '") + name + "'");
    }
    return v.front();
}

/// Rescaled draws b~(c) (X(c t) - d~(c)) for the configured c and t, one per row.
inline Table cmd_simulate(const RunConfig& cfg, unsigned workers) {
    const ModelSpec model = build_model(cfg.model);
    const Which which = parse_which(cfg.which);
    const double t = single(cfg.t, "t");
    const double c = single(cfg.c, "c");
    require_positive(cfg.t, "t");
    if (!(c >= 1.0)) {
        throw ConfigError("c must be >= 1");
    }
    const auto pairs =
        sample_rescaled_pairs(model, c, t, static_cast<std::size_t>(cfg.n_samples), cfg.seed, cfg.stream, 0, workers);
    Table table{{"value"}, {}};
    for (double v : pick(pairs, which)) {
        table.rows.push_back({v});
    }
    return table;
}

/// Limit CDF (or the pre-limit CDF for the exponential model) on the t by x grid.
inline Table cmd_cdf(const RunConfig& cfg, unsigned workers) {
    const ModelSpec model = build_model(cfg.model);
    const Which which = parse_which(cfg.which);
    const auto xs = resolve_x(cfg);
    require_positive(cfg.t, "t");
    const InversionConfig inv = inversion_config(cfg);
    if (cfg.methods.empty() || cfg.methods.size() > 2) {
        throw ConfigError("methods must list one or two methods");
    }
    std::vector<Method> methods;
    for (const auto& m : cfg.methods) {
        methods.push_back(parse_method(m));
    }
    // Probe each route once so unsupported combinations are reported as config errors.
    for (Method m : methods) {
        try {
            (void)limit_cdf(LimitCdfRequest{model, which, m, cfg.t.front(), xs.front()}, inv);
        } catch (const UnsupportedModel& e) {
            throw ConfigError(e.what());
        }
    }

    Table table;
    table.columns = {"t", "x"};
    for (const auto& m : cfg.methods) {
        table.columns.push_back(m);
    }
    if (methods.size() == 2) {
        table.columns.push_back("abs_diff");
    }
    const std::size_t nx = xs.size();
    std::vector<std::vector<double>> values(cfg.t.size() * nx);
    parallel_for(values.size(), workers, [&](std::size_t i) {
        const double t = cfg.t[i / nx];
        const double x = xs[i % nx];
        for (Method m : methods) {
            values[i].push_back(limit_cdf(LimitCdfRequest{model, which, m, t, x}, inv));
        }
    });
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::vector<Cell> row{cfg.t[i / nx], xs[i % nx]};
        for (double v : values[i]) {
            row.emplace_back(v);
        }
        if (methods.size() == 2) {
            row.emplace_back(std::fabs(values[i][0] - values[i][1]));
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

/// Gaver-Stehfest inversion of the CDF transform at the configured order and two below.
inline Table cmd_invert(const RunConfig& cfg, unsigned workers) {
    const ModelSpec model = build_model(cfg.model);
    const Which which = parse_which(cfg.which);
    const auto xs = resolve_x(cfg);
    require_positive(cfg.t, "t");
    const InversionConfig inv = inversion_config(cfg);
    const bool prelimit = std::holds_alternative<ExponentialIndependent>(model);
    const std::size_t nx = xs.size();
    std::vector<CheckedInversion> results(cfg.t.size() * nx, CheckedInversion{0.0, 0.0});
    parallel_for(results.size(), workers, [&](std::size_t i) {
        const double t = cfg.t[i / nx];
        const long double x = xs[i % nx];
        if (prelimit) {
            results[i] = invert_checked(
                [&](long double xi) {
                    return which == Which::Ctrm ? prelimit_laplace_ctrm<long double>(model, xi, x)
                                                : prelimit_laplace_octrm<long double>(model, xi, x);
                },
                t, inv);
        } else {
            const ClExponent psi = cl_exponent(model);
            results[i] = invert_checked(
                [&](long double xi) { return limit_transform<long double>(psi, which, xi, x); }, t, inv);
        }
    });
    Table table{{"t", "x", "order", "value", "value_lower_order", "spread"}, {}};
    for (std::size_t i = 0; i < results.size(); ++i) {
        table.rows.push_back({cfg.t[i / nx], xs[i % nx], std::int64_t{cfg.order}, results[i].value,
                              results[i].lower_order, results[i].spread()});
    }
    return table;
}

/// ConvergenceReport rows; thresholds that fail are reported, not raised.
inline Table cmd_converge(const RunConfig& cfg, unsigned workers) {
    const ModelSpec model = build_model(cfg.model);
    const Which which = parse_which(cfg.which);
    const double t = single(cfg.t, "t");
    require_positive(cfg.t, "t");
    if (!is_limit_model(model)) {
        throw ConfigError("converge needs the independent or coupled model");
    }
    ConvergenceOptions opts;
    opts.stream = cfg.stream;
    opts.ks_threshold = cfg.ks_threshold;
    opts.quantile_points = static_cast<std::size_t>(cfg.quantile_points);
    opts.workers = workers;
    ConvergenceReport report;
    try {
        report = run_convergence(model, which, t, cfg.c, static_cast<std::size_t>(cfg.n_samples), cfg.seed, opts);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    Table table{{"model", "which", "t", "c", "n_samples", "ks_distance", "mc_standard_error", "pass"}, {}};
    for (const auto& row : report.rows) {
        table.rows.push_back({report.model, cfg.which, t, row.c, static_cast<std::int64_t>(row.n_samples),
                              row.ks_distance, row.mc_standard_error, std::int64_t{row.pass ? 1 : 0}});
    }
    return table;
}

/// Residual rows: param = h, value = max |residual| on t_range, metric = ratio to the previous h.
/// Laplace rows: param = xi, value = Psi L(cdf), reference = right side, metric = relative error.
inline Table cmd_govern_check(const RunConfig& cfg, unsigned workers) {
    const ModelSpec model = build_model(cfg.model);
    const Which which = parse_which(cfg.which);
    const auto xs = resolve_x(cfg);
    if (!is_limit_model(model)) {
        throw ConfigError("govern-check needs the independent or coupled model");
    }
    if (cfg.t_range.size() != 2) {
        throw ConfigError("t_range must hold two values");
    }
    require_positive(cfg.xi, "xi");
    ResidualStudyConfig study_cfg{cfg.h, cfg.h_levels, cfg.t_range[0], cfg.t_range[1]};
    try {
        study_cfg.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    Table table{{"section", "x", "param", "value", "reference", "metric"}, {}};
    for (double x : xs) {
        const auto study = residual_convergence(model, which, x, study_cfg, workers);
        for (std::size_t i = 0; i < study.levels.size(); ++i) {
            const auto& level = study.levels[i];
            const double ratio = i == 0 ? nan : level.max_residual / study.levels[i - 1].max_residual;
            table.rows.push_back({std::string("residual"), x, level.h, level.max_residual, nan, ratio});
        }
    }
    for (const auto& check : laplace_identity_checks(model, which, xs, cfg.xi, workers)) {
        table.rows.push_back({std::string("laplace"), check.x, check.xi, check.lhs, check.rhs, check.rel_error});
    }
    return table;
}

inline Table run_command(const std::string& command, const RunConfig& cfg, unsigned workers) {
    if (command == "simulate") {
        return cmd_simulate(cfg, workers);
    }
    if (command == "cdf") {
        return cmd_cdf(cfg, workers);
    }
    if (command == "invert") {
        return cmd_invert(cfg, workers);
    }
    if (command == "converge") {
        return cmd_converge(cfg, workers);
    }
    if (command == "govern-check") {
        return cmd_govern_check(cfg, workers);
    }
    throw ConfigError("unknown command '" + command + "'");
}

} // namespace ctrm::cli

#endif
