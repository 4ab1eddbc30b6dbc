#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "ctrm/experiment.hpp"
#include "ctrm/govern.hpp"
#include "ctrm/limits.hpp"
#include "ctrm/parallel.hpp"
#include "ctrm/rng.hpp"
#include "cli_runner.hpp"
#include "test_support.hpp"

namespace {

using namespace ctrm;
using ctrm::testing::ks_critical_99;
using ctrm::testing::ks_statistic;
using ctrm::testing::run_cli;
using ctrm::testing::ScratchDir;
using ctrm::testing::slurp;

const std::string kCli = CTRM_CLI_PATH;
const std::string kConfigs = CTRM_CONFIG_DIR;
const std::string kFixtures = CTRM_FIXTURE_DIR;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

const std::vector<double>& grid_5x5() {
    static const std::vector<double> g = log_grid(0.1, 10.0, 5);
    return g;
}

Outcome ac1_uncoupled_triple() {
    const ModelSpec model = IndependentStableFrechet{StableIndex(0.5), FrechetShape(1.0)};
    double worst = 0.0;
    for (double t : grid_5x5()) {
        for (double x : grid_5x5()) {
            const double mix = uncoupled_cdf(0.5, 1.0, t, x, UncoupledMethod::Mixture);
            const double ser = uncoupled_cdf(0.5, 1.0, t, x, UncoupledMethod::Series);
            const double inv = limit_cdf_via_inversion(LimitCdfRequest{model, Which::Ctrm, Method::Inversion, t, x});
            worst = std::max({worst, std::fabs(mix - ser), std::fabs(mix - inv), std::fabs(ser - inv)});
        }
    }
    const double series_11 = uncoupled_cdf(0.5, 1.0, 1.0, 1.0, UncoupledMethod::Series);
    const double oracle = std::exp(1.0) * std::erfc(1.0);
    const bool pass = worst < 1e-4 && std::fabs(series_11 - oracle) < 1e-6;
    return {pass, "max pairwise diff " + fmt("%.2e", worst) + " (< 1e-4); series(1,1) " + fmt("%.9f", series_11) +
                      " vs e*erfc(1) " + fmt("%.9f", oracle)};
}

Outcome ac2_coupled_closed_form() {
    double worst = 0.0;
    for (double beta : {0.3, 0.5, 0.7}) {
        for (double gamma : {0.5, 1.0, 2.0}) {
            const ModelSpec model = CoupledProductFrechet{StableIndex(beta), FrechetShape(gamma)};
            for (Which which : {Which::Ctrm, Which::Octrm}) {
                for (double t : grid_5x5()) {
                    for (double x : grid_5x5()) {
                        const double closed = which == Which::Ctrm ? coupled_ctrm_cdf(beta, gamma, t, x)
                                                                   : coupled_octrm_cdf(beta, gamma, t, x);
                        const double inv =
                            limit_cdf_via_inversion(LimitCdfRequest{model, which, Method::Inversion, t, x});
                        worst = std::max(worst, std::fabs(closed - inv));
                    }
                }
            }
        }
    }
    const double g = coupled_ctrm_cdf(0.5, 1.0, 1.0, 1.0);
    const double bessel = std::exp(-0.5) * std::cyl_bessel_i(0.0, 0.5);
    const bool pass = worst < 1e-4 && std::fabs(g - bessel) < 1e-6;
    return {pass, "max |closed - inversion| " + fmt("%.2e", worst) + " over 9 models x CTRM/OCTRM x 25 points; G(1,1) " +
                      fmt("%.9f", g) + " vs e^-1/2 I0(1/2) " + fmt("%.9f", bessel)};
}

// Allowed inversion round-off in F <= G.
constexpr double kOrderingSlack = 1e-10;

Outcome ac3_dichotomy() {
    const ModelSpec independent = IndependentStableFrechet{StableIndex(0.5), FrechetShape(1.0)};
    double gap_independent = 0.0;
    double gap_coupled = 0.0;
    double worst_violation = 0.0;
    for (double t : grid_5x5()) {
        for (double x : grid_5x5()) {
            const double g_ind = limit_cdf_via_inversion(LimitCdfRequest{independent, Which::Ctrm, Method::Inversion, t, x});
            const double f_ind =
                limit_cdf_via_inversion(LimitCdfRequest{independent, Which::Octrm, Method::Inversion, t, x});
            const double g_cpl = coupled_ctrm_cdf(0.5, 1.0, t, x);
            const double f_cpl = coupled_octrm_cdf(0.5, 1.0, t, x);
            gap_independent = std::max(gap_independent, g_ind - f_ind);
            gap_coupled = std::max(gap_coupled, g_cpl - f_cpl);
            worst_violation = std::max({worst_violation, f_ind - g_ind, f_cpl - g_cpl});
        }
    }
    const bool pass = gap_independent < 1e-4 && gap_coupled > 0.01 && worst_violation <= kOrderingSlack;
    return {pass, "max(G-F) independent " + fmt("%.2e", gap_independent) + ", coupled " + fmt("%.4f", gap_coupled) +
                      "; max(F-G) " + fmt("%.2e", worst_violation) + " (<= 1e-10)"};
}

Outcome ac4_poisson_max() {
    const ModelSpec model = ExponentialIndependent(1.0);
    const double x = 2.0;
    const double fj = jump_cdf(JumpLaw::StandardPareto, x);
    const double exact_v = std::exp(-0.5);
    const double exact_u = fj * std::exp(-(1.0 - fj));
    const double inv_v = prelimit_cdf_via_inversion(model, Which::Ctrm, 1.0, x);
    const double inv_u = prelimit_cdf_via_inversion(model, Which::Octrm, 1.0, x);

    constexpr std::size_t n = 100000;
    const auto pairs = sample_rescaled_pairs(model, 1.0, 1.0, n, 20261018, 4, 0, default_workers());
    const double ecdf_v = EcdfTable(pick(pairs, Which::Ctrm)).at(x);
    const double ecdf_u = EcdfTable(pick(pairs, Which::Octrm)).at(x);
    const double se_v = std::sqrt(exact_v * (1.0 - exact_v) / n);
    const double se_u = std::sqrt(exact_u * (1.0 - exact_u) / n);

    const bool pass = std::fabs(inv_v - exact_v) < 1e-5 && std::fabs(inv_u - exact_u) < 1e-5 &&
                      std::fabs(ecdf_v - exact_v) < 3.0 * se_v && std::fabs(ecdf_u - exact_u) < 3.0 * se_u;
    return {pass, "V: inversion err " + fmt("%.1e", std::fabs(inv_v - exact_v)) + ", MC " +
                      fmt("%.2f", std::fabs(ecdf_v - exact_v) / se_v) + " SE; U: inversion err " +
                      fmt("%.1e", std::fabs(inv_u - exact_u)) + ", MC " + fmt("%.2f", std::fabs(ecdf_u - exact_u) / se_u) +
                      " SE"};
}

struct ConvergeRows {
    std::vector<double> c;
    std::vector<double> ks;
};

ConvergeRows parse_converge(const std::string& csv) {
    ConvergeRows rows;
    std::istringstream in(csv);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        if (header) {
            header = false;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cells.push_back(cell);
        }
        rows.c.push_back(std::stod(cells.at(3)));
        rows.ks.push_back(std::stod(cells.at(5)));
    }
    return rows;
}

Outcome ac5_convergence_fixture() {
    const std::string fixture_path = kFixtures + "/ac5_converge.csv";
    const std::string fixture = slurp(fixture_path);
    const auto rerun = run_cli(kCli, {"converge", "--config", fixture_path, "--workers", "3"});
    const ConvergeRows rows = parse_converge(rerun.out);
    bool decreasing = rows.ks.size() == 3;
    for (std::size_t i = 1; i < rows.ks.size(); ++i) {
        decreasing = decreasing && rows.ks[i] < rows.ks[i - 1];
    }
    const bool identical = rerun.exit_code == 0 && rerun.out == fixture;
    const bool small = !rows.ks.empty() && rows.ks.back() < 0.05;
    std::string ks;
    for (double v : rows.ks) {
        ks += (ks.empty() ? "" : ", ") + fmt("%.4f", v);
    }
    return {identical && decreasing && small,
            std::string("fixture ") + (identical ? "reproduced byte-identically" : "MISMATCH") + "; KS at c=1e2,1e3,1e4: " +
                ks + (decreasing ? " (strictly decreasing)" : " (not decreasing)")};
}

Outcome ac6_governing_equations() {
    const ModelSpec coupled = CoupledProductFrechet{StableIndex(0.5), FrechetShape(1.0)};
    const ModelSpec independent = IndependentStableFrechet{StableIndex(0.5), FrechetShape(1.0)};
    const unsigned workers = default_workers();
    double worst_rel = 0.0;
    for (Which which : {Which::Ctrm, Which::Octrm}) {
        for (const auto& c : laplace_identity_checks(coupled, which, {0.5, 1.0, 2.0}, {0.5, 1.0, 2.0}, workers)) {
            worst_rel = std::max(worst_rel, c.rel_error);
        }
    }
    double lo = 1.0;
    double hi = 0.0;
    const std::pair<const ModelSpec*, Which> cases[] = {
        {&independent, Which::Ctrm}, {&coupled, Which::Ctrm}, {&coupled, Which::Octrm}};
    for (const auto& [model, which] : cases) {
        for (double r : residual_convergence(*model, which, 1.0, ResidualStudyConfig{}, workers).ratios()) {
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
    }
    const bool pass = worst_rel < 1e-3 && lo >= 0.4 && hi <= 0.6;
    return {pass, "Laplace identity max rel err " + fmt("%.2e", worst_rel) + " (CTRM and OCTRM); GL residual ratios in [" +
                      fmt("%.4f", lo) + ", " + fmt("%.4f", hi) + "]"};
}

Outcome ac7_samplers() {
    constexpr std::size_t n = 100000;
    const double crit = ks_critical_99(n);
    SeededStream s(20261018, 7);
    std::vector<double> stable(n);
    for (auto& v : stable) {
        v = sample_stable_subordinator(StableIndex(0.5), s);
    }
    const double ks_stable =
        ks_statistic(stable, [](double t) { return t > 0.0 ? std::erfc(1.0 / (2.0 * std::sqrt(t))) : 0.0; });

    const ModelSpec coupled = CoupledProductFrechet{StableIndex(0.5), FrechetShape(1.0)};
    std::vector<double> jumps(n);
    for (auto& v : jumps) {
        v = sample_pair(coupled, s).jump;
    }
    const double ks_jump = ks_statistic(jumps, [](double x) { return x > 0.0 ? std::exp(-std::pow(x, -0.5)) : 0.0; });
    return {ks_stable < crit && ks_jump < crit, "KS stable(0.5) " + fmt("%.4f", ks_stable) + ", coupled J " +
                                                    fmt("%.4f", ks_jump) + " vs 99% critical " + fmt("%.4f", crit)};
}

Outcome ac8_reproducibility() {
    const ScratchDir dir("acceptance");
    std::vector<std::string> failed;
    std::size_t checked = 0;
    for (const std::string command : {"simulate", "cdf", "invert", "govern-check"}) {
        for (const std::string format : {"csv", "json"}) {
            const auto first = dir / (command + "." + format);
            const auto second = dir / (command + ".rerun." + format);
            const auto a = run_cli(kCli, {command, "--config", kConfigs + "/" + command + ".json", "--format", format,
                                          "--workers", "1", "--out", first.string()});
            const auto b = run_cli(kCli, {command, "--config", first.string(), "--workers", "4", "--out", second.string()});
            ++checked;
            if (a.exit_code != 0 || b.exit_code != 0 || slurp(first) != slurp(second)) {
                failed.push_back(command + "/" + format);
            }
        }
    }
    const std::string fixture_path = kFixtures + "/ac5_converge.csv";
    const auto converge = run_cli(kCli, {"converge", "--config", fixture_path, "--workers", "2"});
    ++checked;
    if (converge.exit_code != 0 || converge.out != slurp(fixture_path)) {
        failed.push_back("converge/csv");
    }
    std::string detail = std::to_string(checked - failed.size()) + "/" + std::to_string(checked) +
                         " outputs byte-identical when regenerated from their embedded config with a different --workers";
    for (const auto& f : failed) {
        detail += "; differs: " + f;
    }
    return {failed.empty(), detail};
}

struct Criterion {
    const char* id;
    const char* title;
    double budget_seconds;
    std::function<Outcome()> run;
};

} // namespace

int main() {
    const Criterion criteria[] = {
        {"AC1", "uncoupled mixture/series/inversion agreement", 10.0, ac1_uncoupled_triple},
        {"AC2", "coupled closed form vs inversion", 60.0, ac2_coupled_closed_form},
        {"AC3", "CTRM/OCTRM dichotomy", 30.0, ac3_dichotomy},
        {"AC4", "Poisson-max oracle", 30.0, ac4_poisson_max},
        {"AC5", "frozen-seed convergence fixture", 300.0, ac5_convergence_fixture},
        {"AC6", "governing equations", 120.0, ac6_governing_equations},
        {"AC7", "sampler correctness", 10.0, ac7_samplers},
        {"AC8", "CLI reproducibility", 0.0, ac8_reproducibility},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = c.run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = c.budget_seconds <= 0.0 || seconds < c.budget_seconds;
        const bool pass = outcome.pass && in_time;
        failures += pass ? 0 : 1;
        std::string timing = fmt("%.1f s", seconds);
        if (c.budget_seconds > 0.0) {
            timing += fmt(" of %.0f s budget", c.budget_seconds);
        }
        std::printf("%s %s  %s: %s [%s]\n", c.id, pass ? "PASS" : "FAIL", c.title, outcome.detail.c_str(), timing.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
    return failures == 0 ? 0 : 1;
}
