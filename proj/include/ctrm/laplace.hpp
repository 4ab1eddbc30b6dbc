#ifndef CTRM_LAPLACE_HPP
#define CTRM_LAPLACE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "ctrm/error.hpp"
#include "ctrm/model.hpp"
#include "ctrm/quadrature.hpp"
#include "ctrm/rng.hpp"

namespace ctrm {

/// Values of a function of t on a strictly increasing grid of positive times.
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(std::vector<double> ts, std::vector<double> vals) : ts_(std::move(ts)), vals_(std::move(vals)) {
        if (ts_.size() != vals_.size()) {
            throw DomainError("GridFunction: ts and vals differ in length");
        }
        for (std::size_t i = 0; i < ts_.size(); ++i) {
            if (!(ts_[i] > 0.0) || (i > 0 && !(ts_[i] > ts_[i - 1]))) {
                throw DomainError("GridFunction: times must be positive and strictly increasing");
            }
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return ts_.size(); }
    [[nodiscard]] const std::vector<double>& ts() const noexcept { return ts_; }
    [[nodiscard]] const std::vector<double>& vals() const noexcept { return vals_; }

private:
    std::vector<double> ts_;
    std::vector<double> vals_;
};

/// Log-spaced grid helper, count >= 2.
inline std::vector<double> log_grid(double lo, double hi, std::size_t count) {
    if (count < 2 || !(lo > 0.0) || !(hi > lo)) {
        throw DomainError("log_grid: need 0 < lo < hi and count >= 2");
    }
    std::vector<double> out(count);
    const double step = std::log(hi / lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = lo * std::exp(step * static_cast<double>(i));
    }
    out.back() = hi;
    return out;
}

inline std::vector<double> lin_grid(double lo, double hi, std::size_t count) {
    if (count < 2 || !(hi > lo)) {
        throw DomainError("lin_grid: need lo < hi and count >= 2");
    }
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Gaver-Stehfest inversion

struct InversionConfig {
    int order = 14;
    /// Largest |f_order - f_(order-2)| accepted before AccuracyError.
    double consistency_tol = 1e-3;

    void validate() const {
        if (order < 4 || order > 20 || order % 2 != 0) {
            throw DomainError("InversionConfig: order must be even and in [4, 20], got " + std::to_string(order));
        }
    }
};

namespace detail {

inline constexpr int kMaxStehfestOrder = 20;

using StehfestTable = std::array<std::array<long double, kMaxStehfestOrder + 1>, kMaxStehfestOrder + 1>;

inline StehfestTable make_stehfest_table() {
    StehfestTable table{};
    std::array<long double, 2 * kMaxStehfestOrder + 1> fact{};
    fact[0] = 1.0L;
    for (int i = 1; i <= 2 * kMaxStehfestOrder; ++i) {
        fact[i] = fact[i - 1] * static_cast<long double>(i);
    }
    for (int n = 2; n <= kMaxStehfestOrder; n += 2) {
        const int half = n / 2;
        for (int k = 1; k <= n; ++k) {
            long double s = 0.0L;
            for (int j = (k + 1) / 2; j <= std::min(k, half); ++j) {
                s += std::pow(static_cast<long double>(j), half) * fact[2 * j] /
                     (fact[half - j] * fact[j] * fact[j - 1] * fact[k - j] * fact[2 * j - k]);
            }
            table[n][k] = ((k + half) % 2 == 0) ? s : -s;
        }
    }
    return table;
}

inline const StehfestTable& stehfest_table() {
    static const StehfestTable table = make_stehfest_table();
    return table;
}

} // namespace detail

/// Stehfest weight V_k for an even order, 1 <= k <= order.
inline long double stehfest_weight(int order, int k) { return detail::stehfest_table().at(order).at(k); }

/// Gaver-Stehfest inverse of a real-axis transform at t at one fixed order.
/// The transform is called with long double arguments; weights and the
/// (Neumaier-compensated) sum are carried in long double.
template <class F>
double invert_at_order(F&& transform, double t, int order) {
    if (!(t > 0.0)) {
        throw DomainError("invert: t must be positive");
    }
    const long double a = std::numbers::ln2_v<long double> / static_cast<long double>(t);
    long double sum = 0.0L;
    long double comp = 0.0L;
    for (int k = 1; k <= order; ++k) {
        const long double fk = static_cast<long double>(transform(a * k));
        if (!std::isfinite(fk)) {
            throw AccuracyError("invert: transform is not finite at xi = " + std::to_string(static_cast<double>(a * k)));
        }
        const long double term = stehfest_weight(order, k) * fk;
        const long double next = sum + term;
        comp += std::fabs(sum) >= std::fabs(term) ? (sum - next) + term : (term - next) + sum;
        sum = next;
    }
    return static_cast<double>(a * (sum + comp));
}

template <class F>
double invert(F&& transform, double t, const InversionConfig& cfg = {}) {
    cfg.validate();
    return invert_at_order(transform, t, cfg.order);
}

struct CheckedInversion {
    double value;       // at cfg.order
    double lower_order; // at cfg.order - 2
    [[nodiscard]] double spread() const { return std::fabs(value - lower_order); }
};

/// Inversion at the configured order and two below it; raises AccuracyError
/// when the two differ by more than cfg.consistency_tol.
template <class F>
CheckedInversion invert_checked(F&& transform, double t, const InversionConfig& cfg = {}) {
    cfg.validate();
    CheckedInversion out{invert_at_order(transform, t, cfg.order), invert_at_order(transform, t, cfg.order - 2)};
    if (!(out.spread() <= cfg.consistency_tol)) {
        throw AccuracyError("invert: orders " + std::to_string(cfg.order) + " and " + std::to_string(cfg.order - 2) +
                            " disagree by " + std::to_string(out.spread()) + " at t = " + std::to_string(t));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Forward transform of tabulated functions

struct ForwardTransformResult {
    double value = 0.0;     // Simpson estimate with head and tail closures
    double trapezoid = 0.0; // same with the trapezoid rule on the grid part
    bool coarse_grid = false;
};

/// int_0^inf e^(-xi t) f(t) dt for tabulated f.
///
/// [0, t_min] uses f(t_min); the grid part uses composite Simpson on the
/// nonuniform grid (trapezoid as the coarseness probe); beyond t_max the
/// tail is closed with f(t) ~ f_inf + C t^(-tail_exponent) fitted through
/// the last decade of the grid.
inline ForwardTransformResult forward_transform(const GridFunction& f, double xi, double tail_exponent) {
    if (!(xi > 0.0)) {
        throw DomainError("forward_transform: xi must be positive");
    }
    if (!(tail_exponent > 0.0)) {
        throw DomainError("forward_transform: tail exponent must be positive");
    }
    const auto& ts = f.ts();
    const auto& vs = f.vals();
    const std::size_t n = ts.size();
    if (n < 3) {
        throw DomainError("forward_transform: need at least 3 grid points");
    }
    auto g = [&](std::size_t i) { return std::exp(-xi * ts[i]) * vs[i]; };

    double trap = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        trap += 0.5 * (ts[i + 1] - ts[i]) * (g(i) + g(i + 1));
    }
    double simpson = 0.0;
    std::size_t i = 0;
    for (; i + 2 < n; i += 2) {
        const double h0 = ts[i + 1] - ts[i];
        const double h1 = ts[i + 2] - ts[i + 1];
        const double hs = h0 + h1;
        simpson += hs / 6.0 *
                   ((2.0 - h1 / h0) * g(i) + hs * hs / (h0 * h1) * g(i + 1) + (2.0 - h0 / h1) * g(i + 2));
    }
    if (i + 1 < n) {
        simpson += 0.5 * (ts[i + 1] - ts[i]) * (g(i) + g(i + 1));
    }

    const double head = vs.front() * (-std::expm1(-xi * ts.front())) / xi;

    const double t_hi = ts.back();
    const double t_fit = t_hi / 10.0;
    std::size_t j = 0;
    while (j + 1 < n && ts[j] < t_fit) {
        ++j;
    }
    double tail = 0.0;
    if (j + 1 < n) {
        const double p = tail_exponent;
        const double c = (vs[j] - vs.back()) / (std::pow(ts[j], -p) - std::pow(t_hi, -p));
        const double f_inf = vs.back() - c * std::pow(t_hi, -p);
        tail = f_inf * std::exp(-xi * t_hi) / xi;
        if (c != 0.0) {
            tail += c * quad::integrate_to_infinity(
                            [&](double s) { return std::exp(-xi * s) * std::pow(s, -p); }, t_hi, 1e-10);
        }
    } else {
        tail = vs.back() * std::exp(-xi * t_hi) / xi;
    }

    ForwardTransformResult out;
    out.value = head + simpson + tail;
    out.trapezoid = head + trap + tail;
    out.coarse_grid = std::fabs(out.value - out.trapezoid) > 1e-4 * std::fabs(out.value);
    return out;
}

// ---------------------------------------------------------------------------
// Mittag-Leffler function on the negative real axis

namespace detail {

inline long double reciprocal_gamma(long double x) {
    if (x <= 0.0L && x == std::floor(x)) {
        return 0.0L;
    }
    return 1.0L / std::tgamma(x);
}

inline double ml_series(double beta, double z) {
    const long double zl = z;
    long double sum = 0.0L;
    long double power = 1.0L;
    const double peak = std::pow(-z, 1.0 / beta);
    for (int k = 0; k < 4000; ++k) {
        const long double term = power * reciprocal_gamma(1.0L + static_cast<long double>(beta) * k);
        sum += term;
        if (k > peak + 2 && std::fabs(term) < 1e-21L * (1.0L + std::fabs(sum))) {
            break;
        }
        power *= zl;
    }
    return static_cast<double>(sum);
}

// E_b(-s) = sin(b pi) / (b pi) int_0^inf exp(-(s w)^(1/b)) / (w^2 + 2 w cos(b pi) + 1) dw.
// The integrand is below e^-64 beyond w = 64^b / s, which is the upper limit used.
inline double ml_integral(double beta, double s) {
    const double c = std::cos(beta * std::numbers::pi);
    auto integrand = [&](double w) {
        return std::exp(-std::pow(s * w, 1.0 / beta)) / (w * w + 2.0 * w * c + 1.0);
    };
    const double upper = std::pow(64.0, beta) / s;
    std::vector<double> cuts{0.0, upper};
    for (double k : {0.25, 1.0, 4.0, 16.0}) {
        cuts.push_back(k / s);
    }
    cuts.push_back(-c);
    cuts.push_back(1.0);
    std::sort(cuts.begin(), cuts.end());
    double body = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = std::max(cuts[i], 0.0);
        const double hi = std::min(cuts[i + 1], upper);
        if (hi > lo) {
            // (s w)^(1/b) is not smooth at w = 0 when b > 1/2
            body += lo == 0.0 ? quad::integrate_rough_ends(integrand, lo, hi, 1e-13)
                              : quad::integrate(integrand, lo, hi, 1e-13);
        }
    }
    return std::sin(beta * std::numbers::pi) / (beta * std::numbers::pi) * body;
}

} // namespace detail

/// E_beta(z) = sum z^k / Gamma(1 + beta k) for z <= 0 and 0 < beta <= 1.
///
/// Regimes: power series (long double) while |z|^(1/beta) <= 15, otherwise
/// the integral representation, which is valid for all z < 0.
inline double mittag_leffler(double beta, double z) {
    if (!(beta > 0.0 && beta <= 1.0)) {
        throw DomainError("mittag_leffler: beta must lie in (0, 1]");
    }
    if (!(z <= 0.0)) {
        throw DomainError("mittag_leffler: only z <= 0 is supported");
    }
    if (z == 0.0) {
        return 1.0;
    }
    if (beta == 1.0) {
        return std::exp(z);
    }
    if (std::isinf(z)) {
        return 0.0;
    }
    if (std::pow(-z, 1.0 / beta) <= 15.0) {
        return detail::ml_series(beta, z);
    }
    return detail::ml_integral(beta, -z);
}

// ---------------------------------------------------------------------------
// One-sided stable law with Laplace transform exp(-xi^beta)

namespace detail {

// Breakpoints on (0, pi) for integrands in A(u) y with A(u) = kanter_a(beta, u).
// A increases from A(0+) to +inf, and the mass sits where A y is near
// max(A(0+) y, 1). Cuts are placed at fixed levels of A y; the last one lies
// 64 units past the peak, where the integrands are below e^-64.
inline std::vector<double> kanter_breakpoints(double beta, double y) {
    const double kappa = beta / (1.0 - beta);
    const double a0y = (1.0 - beta) * std::pow(beta, kappa) * y;
    auto level_point = [&](double level) {
        double lo = 0.0;
        double hi = std::numbers::pi;
        for (int i = 0; i < 60; ++i) {
            const double mid = 0.5 * (lo + hi);
            (kanter_a(beta, mid) * y < level ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };
    const double last = std::max(a0y, 1.0) + 64.0;
    std::vector<double> cuts{0.0, level_point(last)};
    for (double level : {a0y + 0.5, a0y + 2.0, a0y + 8.0, a0y + 24.0, 0.1, 1.0, 4.0, 16.0}) {
        if (level > a0y && level < last) {
            cuts.push_back(level_point(level));
        }
    }
    std::sort(cuts.begin(), cuts.end());
    return cuts;
}

template <class F>
double integrate_over_cuts(F&& f, const std::vector<double>& cuts) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        total += quad::integrate(f, cuts[i], cuts[i + 1], 1e-12);
    }
    return total;
}

// Large-x expansions: with r = x^-beta,
// g(x) = 1/(pi x) sum_k (-1)^(k+1) Gamma(beta k + 1) / k! sin(pi beta k) r^k,
// 1 - P(D <= x) = 1/pi sum_k (-1)^(k+1) Gamma(beta k) / k! sin(pi beta k) r^k.
inline constexpr double kStableSeriesRadius = 0.5;

// Both integrands are bounded by (A y) e^(-A y) with A y >= A(0+) y; past 700
// the density and the CDF are below 1e-300.
inline bool stable_underflows(double beta, double y) {
    return (1.0 - beta) * std::pow(beta, beta / (1.0 - beta)) * y > 700.0;
}

inline double stable_series(double beta, double x, bool density) {
    const double r = std::pow(x, -beta);
    long double sum = 0.0L;
    for (int k = 1; k < 200; ++k) {
        const long double bk = static_cast<long double>(beta) * k;
        const long double log_mag = std::lgamma(density ? bk + 1.0L : bk) - std::lgamma(k + 1.0L) +
                                    static_cast<long double>(k) * std::log(static_cast<long double>(r));
        const long double term = (k % 2 == 1 ? 1.0L : -1.0L) * std::exp(log_mag) *
                                 std::sin(std::numbers::pi_v<long double> * bk);
        sum += term;
        if (std::exp(log_mag) < 1e-20L * std::fabs(sum)) {
            break;
        }
    }
    const long double scale = density ? 1.0L / (std::numbers::pi_v<long double> * x) : 1.0L / std::numbers::pi_v<long double>;
    return static_cast<double>(scale * sum);
}

} // namespace detail

/// Density from the Kanter/Zolotarev single integral
/// g(x) = kappa / pi x^(-kappa-1) int_0^pi A(u) exp(-A(u) x^-kappa) du, kappa = beta / (1 - beta).
inline double stable_density_integral(double beta, double x) {
    StableIndex b(beta);
    if (!(x > 0.0)) {
        return 0.0;
    }
    const double kappa = beta / (1.0 - beta);
    const double y = std::pow(x, -kappa);
    if (detail::stable_underflows(beta, y)) {
        return 0.0;
    }
    auto integrand = [&](double u) {
        const double a = kanter_a(b.value(), u);
        if (!std::isfinite(a)) {
            return 0.0;
        }
        return a * y * std::exp(-a * y);
    };
    return kappa / (std::numbers::pi * x) * detail::integrate_over_cuts(integrand, detail::kanter_breakpoints(beta, y));
}

/// Density of the one-sided stable law: closed form at beta = 1/2, the
/// large-x series when x^-beta <= 1/2, the single integral otherwise.
inline double stable_density(double beta, double x) {
    StableIndex b(beta);
    if (!(x > 0.0)) {
        return 0.0;
    }
    if (beta == 0.5) {
        return 0.5 / std::sqrt(std::numbers::pi) * std::pow(x, -1.5) * std::exp(-0.25 / x);
    }
    if (std::pow(x, -beta) <= detail::kStableSeriesRadius) {
        return detail::stable_series(beta, x, true);
    }
    return stable_density_integral(b.value(), x);
}

/// P(D <= x) = 1/pi int_0^pi exp(-A(u) x^-kappa) du, with the same regimes as stable_density.
inline double stable_cdf(double beta, double x) {
    StableIndex b(beta);
    if (!(x > 0.0)) {
        return 0.0;
    }
    if (beta == 0.5) {
        return std::erfc(0.5 / std::sqrt(x));
    }
    if (std::pow(x, -beta) <= detail::kStableSeriesRadius) {
        return 1.0 - detail::stable_series(beta, x, false);
    }
    const double y = std::pow(x, -beta / (1.0 - beta));
    if (detail::stable_underflows(beta, y)) {
        return 0.0;
    }
    auto integrand = [&](double u) {
        const double a = kanter_a(b.value(), u);
        return std::isfinite(a) ? std::exp(-a * y) : 0.0;
    };
    return detail::integrate_over_cuts(integrand, detail::kanter_breakpoints(beta, y)) / std::numbers::pi;
}

} // namespace ctrm

#endif
