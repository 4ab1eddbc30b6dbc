#ifndef CTRM_EXPERIMENT_HPP
#define CTRM_EXPERIMENT_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ctrm/error.hpp"
#include "ctrm/limits.hpp"
#include "ctrm/model.hpp"
#include "ctrm/parallel.hpp"
#include "ctrm/process.hpp"
#include "ctrm/rng.hpp"

namespace ctrm {

/// Sorted sample with its empirical CDF. Samples at -inf (an empty running
/// maximum) count as <= every x.
class EcdfTable {
public:
    explicit EcdfTable(std::vector<double> samples) : sorted_(std::move(samples)) {
        if (sorted_.empty()) {
            throw DomainError("EcdfTable: need at least one sample");
        }
        for (double s : sorted_) {
            if (std::isnan(s)) {
                throw DomainError("EcdfTable: NaN sample");
            }
        }
        std::sort(sorted_.begin(), sorted_.end());
    }

    [[nodiscard]] std::size_t size() const noexcept { return sorted_.size(); }
    [[nodiscard]] std::span<const double> sorted() const noexcept { return sorted_; }

    /// Fraction of samples <= x.
    [[nodiscard]] double at(double x) const {
        const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
        return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
    }

    /// Fraction of samples < x.
    [[nodiscard]] double left_limit(double x) const {
        const auto it = std::lower_bound(sorted_.begin(), sorted_.end(), x);
        return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
    }

private:
    std::vector<double> sorted_;
};

inline double ecdf_eval(const EcdfTable& table, double x) { return table.at(x); }

/// sup |ECDF - cdf| over the grid xs and both one-sided limits at every finite sample point.
template <class Cdf>
double ks_distance(const EcdfTable& table, Cdf&& cdf, std::span<const double> xs) {
    double worst = 0.0;
    for (double x : xs) {
        worst = std::max(worst, std::fabs(table.at(x) - cdf(x)));
    }
    const auto s = table.sorted();
    const double n = static_cast<double>(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        std::size_t j = i;
        while (j < s.size() && s[j] == s[i]) {
            ++j;
        }
        if (std::isfinite(s[i])) {
            const double f = cdf(s[i]);
            worst = std::max(worst, std::fabs(static_cast<double>(i) / n - f));
            worst = std::max(worst, std::fabs(static_cast<double>(j) / n - f));
        }
        i = j;
    }
    return worst;
}

/// Points x_i with cdf(x_i) = (i + 1/2) / count for a CDF supported on (0, inf),
/// located by bisection in log x.
template <class Cdf>
std::vector<double> quantile_grid(Cdf&& cdf, std::size_t count) {
    std::vector<double> xs;
    xs.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double p = (static_cast<double>(i) + 0.5) / static_cast<double>(count);
        double lo = 1.0;
        double hi = 1.0;
        for (int k = 0; k < 200 && cdf(hi) < p; ++k) {
            hi *= 2.0;
        }
        for (int k = 0; k < 200 && cdf(lo) >= p; ++k) {
            lo *= 0.5;
        }
        for (int k = 0; k < 40; ++k) {
            const double mid = std::sqrt(lo * hi);
            (cdf(mid) < p ? lo : hi) = mid;
        }
        xs.push_back(std::sqrt(lo * hi));
    }
    return xs;
}

// ---------------------------------------------------------------------------
// Seeded sampling

inline constexpr std::size_t kChunkSize = 1024;

/// Stream id of one sampling chunk: base + (row << 32) + chunk.
inline std::uint64_t chunk_stream(std::uint64_t base, std::size_t row, std::size_t chunk) {
    return base + (static_cast<std::uint64_t>(row) << 32) + static_cast<std::uint64_t>(chunk);
}

/// n rescaled (CTRM, OCTRM) pairs drawn chunk by chunk; the result does not depend on the worker count.
inline std::vector<CtrmOctrm> sample_rescaled_pairs(const ModelSpec& model, double c, double t, std::size_t n,
                                                    std::uint64_t seed, std::uint64_t stream, std::size_t row,
                                                    unsigned workers = 1) {
    std::vector<CtrmOctrm> out(n);
    const std::size_t chunks = (n + kChunkSize - 1) / kChunkSize;
    parallel_for(chunks, workers, [&](std::size_t chunk) {
        SeededStream rng(seed, chunk_stream(stream, row, chunk));
        const std::size_t end = std::min(n, (chunk + 1) * kChunkSize);
        for (std::size_t i = chunk * kChunkSize; i < end; ++i) {
            out[i] = rescaled_pair(model, c, t, rng);
        }
    });
    return out;
}

inline std::vector<double> pick(const std::vector<CtrmOctrm>& pairs, Which which) {
    std::vector<double> v(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        v[i] = which == Which::Ctrm ? pairs[i].ctrm : pairs[i].octrm;
    }
    return v;
}

// ---------------------------------------------------------------------------
// Convergence study

struct ConvergenceRow {
    double c;
    std::size_t n_samples;
    double ks_distance;
    double mc_standard_error; // 0.5 / sqrt(n)
    bool pass;
};

struct ConvergenceReport {
    std::string model;
    Which which = Which::Ctrm;
    double t = 1.0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    double ks_threshold = 0.05;
    std::vector<ConvergenceRow> rows;
};

struct ConvergenceOptions {
    std::uint64_t stream = 0;
    double ks_threshold = 0.05;
    std::size_t quantile_points = 512;
    unsigned workers = 1;
};

/// KS distance between rescaled samples at each c and the limit CDF. A row
/// passes when its KS is below the threshold and below the previous row's.
inline ConvergenceReport run_convergence(const ModelSpec& model, Which which, double t, const std::vector<double>& cs,
                                         std::size_t n_samples, std::uint64_t seed,
                                         const ConvergenceOptions& opts = {}) {
    if (!is_limit_model(model)) {
        throw UnsupportedModel("run_convergence: needs a model with a scaling limit");
    }
    if (cs.empty() || n_samples == 0) {
        throw DomainError("run_convergence: need at least one c and one sample");
    }
    for (std::size_t i = 0; i < cs.size(); ++i) {
        if (!(cs[i] >= 1.0) || (i > 0 && !(cs[i] > cs[i - 1]))) {
            throw DomainError("run_convergence: c values must be >= 1 and strictly increasing");
        }
    }
    const Method method = std::holds_alternative<IndependentStableFrechet>(model) ? Method::Series : Method::ClosedForm;
    auto cdf = [&](double x) { return limit_cdf(LimitCdfRequest{model, which, method, t, x}); };
    const auto grid = quantile_grid(cdf, opts.quantile_points);

    ConvergenceReport report{std::string(model_name(model)), which, t, seed, opts.stream, opts.ks_threshold, {}};
    for (std::size_t row = 0; row < cs.size(); ++row) {
        const auto pairs = sample_rescaled_pairs(model, cs[row], t, n_samples, seed, opts.stream, row, opts.workers);
        const EcdfTable table(pick(pairs, which));
        const double ks = ks_distance(table, cdf, grid);
        const bool decreasing = row == 0 || ks < report.rows.back().ks_distance;
        report.rows.push_back({cs[row], n_samples, ks, 0.5 / std::sqrt(static_cast<double>(n_samples)),
                               ks < opts.ks_threshold && decreasing});
    }
    return report;
}

// ---------------------------------------------------------------------------
// Paired CTRM / OCTRM comparison

struct PairedGap {
    double max_gap = 0.0;           // sup_x ECDF_V(x) - ECDF_U(x)
    double location = 0.0;          // an x attaining it
    double standard_error = 0.0;    // 0.5 / sqrt(n)
    std::size_t domination_violations = 0; // pairs with U < V
};

/// Same-path CTRM and OCTRM samples; the sup is exact since both ECDFs only jump at sample points.
inline PairedGap compare_ctrm_octrm(const ModelSpec& model, double t, double c, std::size_t n_samples,
                                    std::uint64_t seed, std::uint64_t stream = 0, unsigned workers = 1) {
    if (n_samples == 0) {
        throw DomainError("compare_ctrm_octrm: need at least one sample");
    }
    const auto pairs = sample_rescaled_pairs(model, c, t, n_samples, seed, stream, 0, workers);
    PairedGap out;
    for (const auto& p : pairs) {
        if (p.octrm < p.ctrm) {
            ++out.domination_violations;
        }
    }
    const EcdfTable v(pick(pairs, Which::Ctrm));
    const EcdfTable u(pick(pairs, Which::Octrm));
    out.location = v.sorted().front();
    for (const auto& table : {&v, &u}) {
        for (double x : table->sorted()) {
            const double gap = std::fabs(v.at(x) - u.at(x));
            if (gap > out.max_gap) {
                out.max_gap = gap;
                out.location = x;
            }
        }
    }
    out.standard_error = 0.5 / std::sqrt(static_cast<double>(n_samples));
    return out;
}

} // namespace ctrm

#endif
