#ifndef CTRM_GOVERN_HPP
#define CTRM_GOVERN_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ctrm/laplace.hpp"
#include "ctrm/limits.hpp"
#include "ctrm/model.hpp"
#include "ctrm/parallel.hpp"
#include "ctrm/process.hpp"

namespace ctrm {

/// Uniform grid t_k = k h, k = 0..n.
struct FractionalGrid {
    double h = 1e-3;
    std::size_t n = 2;

    void validate() const {
        if (!(h > 0.0) || !std::isfinite(h)) {
            throw DomainError("FractionalGrid: h must be positive");
        }
        if (n < 2) {
            throw DomainError("FractionalGrid: need n >= 2");
        }
    }
    [[nodiscard]] double time(std::size_t k) const { return static_cast<double>(k) * h; }
};

/// Alternating binomial weights w_j = (-1)^j binom(beta, j), j < count.
inline std::vector<double> gl_weights(double beta, std::size_t count) {
    std::vector<double> w(count);
    if (count == 0) {
        return w;
    }
    w[0] = 1.0;
    for (std::size_t j = 1; j < count; ++j) {
        w[j] = w[j - 1] * (1.0 - (beta + 1.0) / static_cast<double>(j));
    }
    return w;
}

namespace detail {

// h^-beta sum_{j<=k} w_j e^(-j h tilt) f_(k-j) at k = 1..n; the tilt
// e^(-t q) d^beta [e^(t q) f] folds into the weights.
inline GridFunction gl_tilted(const FractionalGrid& grid, std::span<const double> values, double beta, double tilt,
                              unsigned workers) {
    grid.validate();
    if (values.size() != grid.n + 1) {
        throw DomainError("gl_fractional_derivative: expected n + 1 values including f(0), got " +
                          std::to_string(values.size()));
    }
    std::vector<double> w = gl_weights(beta, grid.n + 1);
    if (tilt != 0.0) {
        for (std::size_t j = 0; j < w.size(); ++j) {
            w[j] *= std::exp(-static_cast<double>(j) * grid.h * tilt);
        }
    }
    const double scale = std::pow(grid.h, -beta);
    std::vector<double> ts(grid.n);
    std::vector<double> out(grid.n);
    parallel_for(grid.n, workers, [&](std::size_t i) {
        const std::size_t k = i + 1;
        double sum = 0.0;
        for (std::size_t j = 0; j <= k; ++j) {
            sum += w[j] * values[k - j];
        }
        ts[i] = grid.time(k);
        out[i] = scale * sum;
    });
    return GridFunction(std::move(ts), std::move(out));
}

} // namespace detail

/// Grunwald-Letnikov approximation of the Riemann-Liouville derivative of
/// order beta at t_1..t_n; values holds f(t_0)..f(t_n), f(t_0) = f(0).
inline GridFunction gl_fractional_derivative(const FractionalGrid& grid, std::span<const double> values, StableIndex beta,
                                             unsigned workers = 1) {
    return detail::gl_tilted(grid, values, beta.value(), 0.0, workers);
}

/// Same operator for f tabulated at t_k = k h, k = 1..n, with f(0) passed separately.
inline GridFunction gl_fractional_derivative(const GridFunction& f, double f0, StableIndex beta, unsigned workers = 1) {
    const auto& ts = f.ts();
    if (ts.size() < 2) {
        throw DomainError("gl_fractional_derivative: need at least two grid points");
    }
    const double h = ts[0];
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const double expected = h * static_cast<double>(k + 1);
        if (std::fabs(ts[k] - expected) > 1e-9 * expected) {
            throw DomainError("gl_fractional_derivative: grid must be uniform and start at h");
        }
    }
    std::vector<double> values;
    values.reserve(ts.size() + 1);
    values.push_back(f0);
    values.insert(values.end(), f.vals().begin(), f.vals().end());
    return gl_fractional_derivative(FractionalGrid{h, ts.size()}, values, beta, workers);
}

/// Limit CDF tabulated at the given times by a fixed method.
inline GridFunction tabulate_limit_cdf(const ModelSpec& model, Which which, Method method, double x,
                                       const std::vector<double>& ts, unsigned workers = 1) {
    std::vector<double> vals(ts.size());
    parallel_for(ts.size(), workers, [&](std::size_t i) {
        vals[i] = limit_cdf(LimitCdfRequest{model, which, method, ts[i], x});
    });
    return GridFunction(ts, std::move(vals));
}

namespace detail {

inline std::vector<double> grid_times(const FractionalGrid& grid) {
    std::vector<double> ts(grid.n);
    for (std::size_t k = 1; k <= grid.n; ++k) {
        ts[k - 1] = grid.time(k);
    }
    return ts;
}

// Values at t_0..t_n; every limit CDF here equals 1 at t = 0 for x > 0.
inline std::vector<double> with_origin(const GridFunction& f, double x) {
    std::vector<double> values;
    values.reserve(f.size() + 1);
    values.push_back(x > 0.0 ? 1.0 : 0.0);
    values.insert(values.end(), f.vals().begin(), f.vals().end());
    return values;
}

inline double stable_forcing(double beta, double t) { return std::pow(t, -beta) / std::tgamma(1.0 - beta); }

inline GridFunction residual_from_values(const FractionalGrid& grid, std::span<const double> values, double beta,
                                         double tilt, double potential, auto&& rhs, unsigned workers) {
    GridFunction d = gl_tilted(grid, values, beta, tilt, workers);
    std::vector<double> r(grid.n);
    for (std::size_t k = 1; k <= grid.n; ++k) {
        r[k - 1] = d.vals()[k - 1] + potential * values[k] - rhs(grid.time(k));
    }
    return GridFunction(d.ts(), std::move(r));
}

} // namespace detail

/// d_t^beta F + x^-alpha F - t^-beta / Gamma(1 - beta) on t_1..t_n, with F from the series route.
inline GridFunction residual_uncoupled(double beta, double alpha, const FractionalGrid& grid, double x,
                                       unsigned workers = 1) {
    const StableIndex b(beta);
    const FrechetShape a(alpha);
    grid.validate();
    const ModelSpec model = IndependentStableFrechet{b, a};
    const auto f = tabulate_limit_cdf(model, Which::Ctrm, Method::Series, x, detail::grid_times(grid), workers);
    const auto values = detail::with_origin(f, x);
    const double potential = x > 0.0 ? std::pow(x, -alpha) : 0.0;
    return detail::residual_from_values(
        grid, values, beta, 0.0, potential, [&](double t) { return detail::stable_forcing(beta, t); }, workers);
}

/// e^(-t q) d_t^beta [e^(t q) G] - t^-beta / Gamma(1 - beta), q = x^-gamma.
inline GridFunction residual_coupled_ctrm(double beta, double gamma, const FractionalGrid& grid, double x,
                                          unsigned workers = 1) {
    const StableIndex b(beta);
    const FrechetShape g(gamma);
    grid.validate();
    const ModelSpec model = CoupledProductFrechet{b, g};
    const auto f = tabulate_limit_cdf(model, Which::Ctrm, Method::ClosedForm, x, detail::grid_times(grid), workers);
    const auto values = detail::with_origin(f, x);
    const double q = x > 0.0 ? std::pow(x, -gamma) : 0.0;
    return detail::residual_from_values(
        grid, values, beta, q, 0.0, [&](double t) { return detail::stable_forcing(beta, t); }, workers);
}

/// e^(-t q) d_t^beta [e^(t q) F] - int_t^inf e^(-r q) beta / Gamma(1 - beta) r^(-beta-1) dr.
inline GridFunction residual_coupled_octrm(double beta, double gamma, const FractionalGrid& grid, double x,
                                           unsigned workers = 1) {
    const StableIndex b(beta);
    const FrechetShape g(gamma);
    grid.validate();
    const ModelSpec model = CoupledProductFrechet{b, g};
    const auto f = tabulate_limit_cdf(model, Which::Octrm, Method::ClosedForm, x, detail::grid_times(grid), workers);
    const auto values = detail::with_origin(f, x);
    const double q = x > 0.0 ? std::pow(x, -gamma) : 0.0;
    auto rhs = [&](double t) { return x > 0.0 ? exponent_measure_tail(model, t, x) : 0.0; };
    return detail::residual_from_values(grid, values, beta, q, 0.0, rhs, workers);
}

// ---------------------------------------------------------------------------
// Self-convergence of the time-domain residuals

struct ResidualLevel {
    double h;
    double max_residual;
};

struct ResidualStudy {
    std::vector<ResidualLevel> levels; // h halves from one entry to the next

    /// max_residual(h / 2) / max_residual(h) for consecutive levels.
    [[nodiscard]] std::vector<double> ratios() const {
        std::vector<double> r;
        for (std::size_t i = 1; i < levels.size(); ++i) {
            r.push_back(levels[i].max_residual / levels[i - 1].max_residual);
        }
        return r;
    }
};

struct ResidualStudyConfig {
    double h0 = 1e-3;
    int level_count = 4;
    double t_lo = 0.5;
    double t_hi = 2.0;

    void validate() const {
        if (!(h0 > 0.0) || level_count < 1 || level_count > 12 || !(t_lo > 0.0) || !(t_hi > t_lo)) {
            throw DomainError("ResidualStudyConfig: need h0 > 0, 1 <= level_count <= 12 and 0 < t_lo < t_hi");
        }
    }
};

/// Tabulates the residual once on the finest grid h0 / 2^(levels-1) and
/// evaluates each coarser level from the nested subgrid.
inline ResidualStudy residual_convergence(const ModelSpec& model, Which which, double x, const ResidualStudyConfig& cfg,
                                          unsigned workers = 1) {
    cfg.validate();
    const std::size_t refine = std::size_t{1} << (cfg.level_count - 1);
    const std::size_t n_coarse = static_cast<std::size_t>(std::ceil(cfg.t_hi / cfg.h0 - 1e-9));
    const FractionalGrid fine{cfg.h0 / static_cast<double>(refine), n_coarse * refine};
    fine.validate();

    double beta = 0.0;
    double tilt = 0.0;
    double potential = 0.0;
    Which tab_which = Which::Ctrm;
    Method method = Method::ClosedForm;
    bool octrm_rhs = false;
    if (const auto* m = std::get_if<IndependentStableFrechet>(&model)) {
        beta = m->beta.value();
        potential = x > 0.0 ? std::pow(x, -m->alpha.value()) : 0.0;
        method = Method::Series;
    } else if (const auto* c = std::get_if<CoupledProductFrechet>(&model)) {
        beta = c->beta.value();
        tilt = x > 0.0 ? std::pow(x, -c->gamma.value()) : 0.0;
        tab_which = which;
        octrm_rhs = which == Which::Octrm;
    } else {
        throw UnsupportedModel("residual_convergence: governing equations are defined for the limit models only");
    }

    const auto f = tabulate_limit_cdf(model, tab_which, method, x, detail::grid_times(fine), workers);
    const auto fine_values = detail::with_origin(f, x);
    auto rhs = [&](double t) {
        if (octrm_rhs) {
            return x > 0.0 ? exponent_measure_tail(model, t, x) : 0.0;
        }
        return detail::stable_forcing(beta, t);
    };

    ResidualStudy study;
    for (int level = 0; level < cfg.level_count; ++level) {
        const std::size_t stride = refine >> level;
        const FractionalGrid grid{fine.h * static_cast<double>(stride), fine.n / stride};
        std::vector<double> values(grid.n + 1);
        for (std::size_t k = 0; k <= grid.n; ++k) {
            values[k] = fine_values[k * stride];
        }
        const auto r = detail::residual_from_values(grid, values, beta, tilt, potential, rhs, workers);
        double worst = 0.0;
        for (std::size_t k = 0; k < r.size(); ++k) {
            const double t = r.ts()[k];
            if (t >= cfg.t_lo * (1.0 - 1e-12) && t <= cfg.t_hi * (1.0 + 1e-12)) {
                worst = std::max(worst, std::fabs(r.vals()[k]));
            }
        }
        study.levels.push_back({grid.h, worst});
    }
    return study;
}

// ---------------------------------------------------------------------------
// Laplace-domain form of the governing equations

struct LaplaceIdentityCheck {
    double xi = 0.0;
    double x = 0.0;
    double lhs = 0.0;       // Psi(xi, x) L(cdf)(xi)
    double rhs = 0.0;       // Psi_D(xi) / xi, or (Psi + log F_A) / xi for the OCTRM
    double rel_error = 0.0; // |lhs - rhs| / |rhs|
    bool coarse_grid = false;
};

/// Log grid used for the forward transform of tabulated limit CDFs.
inline std::vector<double> laplace_check_times() { return log_grid(1e-10, 200.0, 2001); }

/// Compares Psi L(cdf) with the right side, the transform taken from a tabulated CDF.
inline LaplaceIdentityCheck laplace_identity_check(const ModelSpec& model, Which which, double x,
                                                   const GridFunction& cdf, double xi) {
    const ClExponent psi = cl_exponent(model);
    const auto ft = forward_transform(cdf, xi, psi.beta());
    const double full = psi.psi(xi, x);
    LaplaceIdentityCheck out;
    out.xi = xi;
    out.x = x;
    out.lhs = full * ft.value;
    out.rhs = which == Which::Ctrm ? psi.psi_D(xi) / xi : (full + psi.log_FA(x)) / xi;
    out.rel_error = std::fabs(out.lhs - out.rhs) / std::fabs(out.rhs);
    out.coarse_grid = ft.coarse_grid;
    return out;
}

/// Tabulates the closed-form (or series) CDF once per x and checks every xi.
inline std::vector<LaplaceIdentityCheck> laplace_identity_checks(const ModelSpec& model, Which which,
                                                                 const std::vector<double>& xs,
                                                                 const std::vector<double>& xis, unsigned workers = 1) {
    const Method method = std::holds_alternative<IndependentStableFrechet>(model) ? Method::Series : Method::ClosedForm;
    const auto ts = laplace_check_times();
    std::vector<LaplaceIdentityCheck> out;
    for (double x : xs) {
        const auto cdf = tabulate_limit_cdf(model, which, method, x, ts, workers);
        for (double xi : xis) {
            out.push_back(laplace_identity_check(model, which, x, cdf, xi));
        }
    }
    return out;
}

} // namespace ctrm

#endif
