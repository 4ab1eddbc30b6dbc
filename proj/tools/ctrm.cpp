#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "ctrm/cli.hpp"
#include "ctrm/parallel.hpp"

namespace {

unsigned workers_from_env() {
    if (const char* env = std::getenv("CTRM_WORKERS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) {
                return static_cast<unsigned>(v);
            }
        } catch (const std::exception&) {
        }
        std::fprintf(stderr, "ctrm: ignoring invalid CTRM_WORKERS='%s'\n", env);
    }
    return ctrm::default_workers();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Continuous time random maxima: simulation, limit CDFs and checks"};
    app.set_version_flag("--version", std::string(ctrm::cli::kVersion));
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    std::string out_path;
    std::optional<std::string> format;
    app.add_option("--config", config_path, "JSON config, or an output file whose embedded config is reused");
    app.add_option("--seed", seed, "override the config seed");
    app.add_option("--workers", workers, "worker threads (default: CTRM_WORKERS or hardware concurrency)")
        ->check(CLI::PositiveNumber);
    app.add_option("--out", out_path, "output path (default: stdout)");
    app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    for (const char* name : {"simulate", "cdf", "invert", "converge", "govern-check"}) {
        app.add_subcommand(name)->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ctrm::cli::kOk : ctrm::cli::kConfig;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        ctrm::cli::RunConfig cfg = config_path.empty() ? ctrm::cli::RunConfig{} : ctrm::cli::load_config(config_path);
        if (seed) {
            cfg.seed = *seed;
        }
        if (format) {
            cfg.format = *format;
        }
        const unsigned n_workers = workers ? *workers : workers_from_env();
        const auto table = ctrm::cli::run_command(command, cfg, n_workers);
        ctrm::cli::write_output(ctrm::cli::render(table, command, cfg), out_path);
        return ctrm::cli::kOk;
    } catch (const ctrm::IoError& e) {
        std::fprintf(stderr, "ctrm: io error: %s\n", e.what());
        return ctrm::cli::kIo;
    } catch (const ctrm::AccuracyError& e) {
        std::fprintf(stderr, "ctrm: numerical accuracy failure: %s\n", e.what());
        return ctrm::cli::kAccuracy;
    } catch (const ctrm::ConfigError& e) {
        std::fprintf(stderr, "ctrm: config error: %s\n", e.what());
        return ctrm::cli::kConfig;
    } catch (const ctrm::UnsupportedModel& e) {
        std::fprintf(stderr, "ctrm: config error: %s\n", e.what());
        return ctrm::cli::kConfig;
    } catch (const ctrm::DomainError& e) {
        std::fprintf(stderr, "ctrm: config error: %s\n", e.what());
        return ctrm::cli::kConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "ctrm: internal error: %s\n", e.what());
        return ctrm::cli::kInternal;
    }
}
