#ifndef CTRM_LIMITS_HPP
#define CTRM_LIMITS_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <variant>

#include "ctrm/laplace.hpp"
#include "ctrm/model.hpp"
#include "ctrm/process.hpp"
#include "ctrm/quadrature.hpp"

namespace ctrm {

enum class Method { Inversion, ClosedForm, Series };

enum class UncoupledMethod { Mixture, Series };

/// One evaluation of G(t, x) (CTRM) or F(t, x) (OCTRM).
struct LimitCdfRequest {
    ModelSpec model;
    Which which = Which::Ctrm;
    Method method = Method::Inversion;
    double t = 1.0;
    double x = 1.0;
};

namespace detail {

inline void require_tx(double t, double x, const char* where) {
    if (!(t > 0.0) || std::isnan(x)) {
        throw DomainError(std::string(where) + ": need t > 0 and a numeric x");
    }
}

/// Clamp inversion output lying within max(1e-6, spread) of [0, 1], where spread
/// is the order-to-order difference of the inversion; anything further out is a breakdown.
inline double clamp_probability(double p, double spread = 0.0) {
    const double slack = std::max(1e-6, spread);
    if (!(p >= -slack && p <= 1.0 + slack)) {
        throw AccuracyError("inverted CDF value " + std::to_string(p) + " lies outside [0, 1]");
    }
    return std::clamp(p, 0.0, 1.0);
}

} // namespace detail

/// Laplace transform in t of the limit CDF:
/// CTRM (1/xi) Psi_D(xi) / Psi(xi, x); OCTRM (1/xi) (Psi(xi, x) + log F_A(x)) / Psi(xi, x).
template <class R = double>
R limit_transform(const ClExponent& psi, Which which, R xi, R x) {
    const R full = psi.psi(xi, x);
    if (which == Which::Ctrm) {
        return psi.psi_D(xi) / full / xi;
    }
    return (full + psi.log_FA(x)) / full / xi;
}

inline double limit_cdf_via_inversion(const LimitCdfRequest& req, const InversionConfig& cfg = {}) {
    detail::require_tx(req.t, req.x, "limit_cdf_via_inversion");
    const ClExponent psi = cl_exponent(req.model);
    if (req.x <= psi.left_endpoint()) {
        return 0.0;
    }
    if (req.x >= psi.right_endpoint()) {
        return 1.0;
    }
    const long double x = req.x;
    auto transform = [&](long double xi) { return limit_transform<long double>(psi, req.which, xi, x); };
    const CheckedInversion r = invert_checked(transform, req.t, cfg);
    return detail::clamp_probability(r.value, r.spread());
}

/// G(t, x) = int_0^t exp(-u x^-gamma) u^(beta-1) (t-u)^(-beta) / (Gamma(beta) Gamma(1-beta)) du:
/// the law of B^(1/gamma) Z with B ~ Beta(beta, 1-beta) on [0, t].
inline double coupled_ctrm_cdf(double beta, double gamma, double t, double x) {
    const StableIndex b(beta);
    const FrechetShape g(gamma);
    detail::require_tx(t, x, "coupled_ctrm_cdf");
    if (x <= 0.0) {
        return 0.0;
    }
    if (std::isinf(x)) {
        return 1.0;
    }
    const double q = std::pow(x, -g.value());
    const double norm = std::sin(std::numbers::pi * b.value()) / std::numbers::pi; // 1 / (Gamma(b) Gamma(1-b))
    constexpr double kCutoff = 64.0;
    if (q * t > kCutoff) {
        // The factor e^(-u q) confines the mass to u < 64 / q; the rest is below e^-64.
        const double cut = kCutoff / q;
        auto h = [&](double u) { return std::exp(-u * q) * std::pow(t - u, -b.value()); };
        return norm * quad::integrate_beta_weighted(h, 0.0, cut, b.value(), 1.0, 1e-12);
    }
    auto h = [q](double u) { return std::exp(-u * q); };
    return norm * quad::integrate_beta_weighted(h, 0.0, t, b.value(), 1.0 - b.value(), 1e-12);
}

/// F(t, x) = int_0^t (t-u)^(beta-1) exp(-(t-u) x^-gamma) / Gamma(beta) Phi((u, inf) x [0, x]) du,
/// the convolution of the tilted Beta kernel with the exponent-measure tail.
inline double coupled_octrm_cdf(double beta, double gamma, double t, double x) {
    const StableIndex b(beta);
    const FrechetShape g(gamma);
    detail::require_tx(t, x, "coupled_octrm_cdf");
    if (x <= 0.0) {
        return 0.0;
    }
    if (std::isinf(x)) {
        return 1.0;
    }
    const ModelSpec model = CoupledProductFrechet{b, g};
    const double q = std::pow(x, -g.value());
    const double inv_gamma_beta = 1.0 / std::tgamma(b.value());
    const double gamma_one_minus = std::tgamma(1.0 - b.value());
    // u^beta times the tail; near u = 0 it equals (e^-z - z^beta Gamma(1-beta)) / Gamma(1-beta) + O(z), z = u q.
    auto scaled_tail = [&](double u) {
        const double z = u * q;
        if (z < 1e-12) {
            return (std::exp(-z) - std::pow(z, b.value()) * gamma_one_minus) / gamma_one_minus;
        }
        return std::pow(u, b.value()) * exponent_measure_tail(model, u, x);
    };
    // The tail behaves like u^-beta at 0; that factor is carried by the quadrature weight.
    auto h = [&](double u) { return std::exp(-(t - u) * q) * inv_gamma_beta * scaled_tail(u); };
    return quad::integrate_beta_weighted(h, 0.0, t, 1.0 - b.value(), b.value(), 1e-10);
}

/// Uncoupled limit CDF (equal for CTRM and OCTRM). Mixture integrates
/// F(t,x) = int_0^inf F_A(x)^u g_beta(u^(-1/beta) t) (t/beta) u^(-1/beta-1) du
/// over log u; Series evaluates E_beta(-x^-alpha t^beta).
inline double uncoupled_cdf(double beta, double alpha, double t, double x, UncoupledMethod method) {
    const StableIndex b(beta);
    const FrechetShape a(alpha);
    detail::require_tx(t, x, "uncoupled_cdf");
    if (x <= 0.0) {
        return 0.0;
    }
    if (std::isinf(x)) {
        return 1.0;
    }
    const double q = std::pow(x, -a.value());
    if (method == UncoupledMethod::Series) {
        return mittag_leffler(b.value(), -q * std::pow(t, b.value()));
    }
    const double bv = b.value();
    // y = log u; the integrand gains a factor u.
    auto integrand = [&](double y) {
        const double u = std::exp(y);
        const double v = std::pow(u, -1.0 / bv) * t;
        return std::exp(-u * q) * stable_density(bv, v) * (t / bv) * std::pow(u, -1.0 / bv);
    };
    const double centre = bv * std::log(t);
    double total = 0.0;
    const double edges[] = {centre - 45.0, centre - 10.0, centre - 3.0, centre, centre + 3.0, centre + 12.0};
    for (std::size_t i = 0; i + 1 < std::size(edges); ++i) {
        total += quad::integrate(integrand, edges[i], edges[i + 1], 1e-12);
    }
    return total;
}

// ---------------------------------------------------------------------------
// Pre-limit transforms for the exponential-wait model

namespace detail {

inline const ExponentialIndependent& require_exponential(const ModelSpec& model, const char* where) {
    const auto* m = std::get_if<ExponentialIndependent>(&model);
    if (m == nullptr) {
        throw UnsupportedModel(std::string(where) + ": needs the exponential pre-limit model (closed joint transform)");
    }
    return *m;
}

} // namespace detail

/// int_0^inf e^(-xi t) P(V(t) <= x) dt = (1/xi) (1 - P~_W(xi)) / (1 - L(P_(W,J))(xi, x)).
template <class R = double>
R prelimit_laplace_ctrm(const ModelSpec& model, R xi, R x) {
    const auto& m = detail::require_exponential(model, "prelimit_laplace_ctrm");
    const R rate = m.rate;
    const R fj = jump_cdf(m.jumps, static_cast<double>(x));
    const R wait_lt = rate / (rate + xi);
    const R joint_lt = fj * wait_lt;
    return (R(1) - wait_lt) / (R(1) - joint_lt) / xi;
}

/// int_0^inf e^(-xi t) P(U(t) <= x) dt = (1/xi) (F_J(x) - L(P_(W,J))(xi, x)) / (1 - L(P_(W,J))(xi, x)).
template <class R = double>
R prelimit_laplace_octrm(const ModelSpec& model, R xi, R x) {
    const auto& m = detail::require_exponential(model, "prelimit_laplace_octrm");
    const R rate = m.rate;
    const R fj = jump_cdf(m.jumps, static_cast<double>(x));
    const R joint_lt = fj * rate / (rate + xi);
    return (fj - joint_lt) / (R(1) - joint_lt) / xi;
}

inline double prelimit_cdf_via_inversion(const ModelSpec& model, Which which, double t, double x,
                                         const InversionConfig& cfg = {}) {
    detail::require_exponential(model, "prelimit_cdf_via_inversion");
    detail::require_tx(t, x, "prelimit_cdf_via_inversion");
    const long double xl = x;
    auto transform = [&](long double xi) {
        return which == Which::Ctrm ? prelimit_laplace_ctrm<long double>(model, xi, xl)
                                    : prelimit_laplace_octrm<long double>(model, xi, xl);
    };
    const CheckedInversion r = invert_checked(transform, t, cfg);
    return detail::clamp_probability(r.value, r.spread());
}

/// Poisson-max closed form: P(V(t) <= x) = exp(-rate t (1 - F_J(x))), P(U(t) <= x) = F_J(x) P(V(t) <= x).
inline double prelimit_closed_form_cdf(const ModelSpec& model, Which which, double t, double x) {
    const auto& m = detail::require_exponential(model, "prelimit_closed_form_cdf");
    detail::require_tx(t, x, "prelimit_closed_form_cdf");
    const double fj = jump_cdf(m.jumps, x);
    const double v = std::exp(-m.rate * t * (1.0 - fj));
    return which == Which::Ctrm ? v : fj * v;
}

/// Dispatch over (model, method). Unsupported combinations raise UnsupportedModel.
inline double limit_cdf(const LimitCdfRequest& req, const InversionConfig& cfg = {}) {
    struct Visitor {
        const LimitCdfRequest& req;
        const InversionConfig& cfg;
        double operator()(const IndependentStableFrechet& m) const {
            switch (req.method) {
            case Method::Inversion:
                return limit_cdf_via_inversion(req, cfg);
            case Method::ClosedForm:
                return uncoupled_cdf(m.beta.value(), m.alpha.value(), req.t, req.x, UncoupledMethod::Mixture);
            case Method::Series:
                return uncoupled_cdf(m.beta.value(), m.alpha.value(), req.t, req.x, UncoupledMethod::Series);
            }
            return 0.0;
        }
        double operator()(const CoupledProductFrechet& m) const {
            switch (req.method) {
            case Method::Inversion:
                return limit_cdf_via_inversion(req, cfg);
            case Method::ClosedForm:
                return req.which == Which::Ctrm ? coupled_ctrm_cdf(m.beta.value(), m.gamma.value(), req.t, req.x)
                                                : coupled_octrm_cdf(m.beta.value(), m.gamma.value(), req.t, req.x);
            case Method::Series:
                throw UnsupportedModel("series method is only defined for the independent model");
            }
            return 0.0;
        }
        double operator()(const ExponentialIndependent&) const {
            switch (req.method) {
            case Method::Inversion:
                return prelimit_cdf_via_inversion(req.model, req.which, req.t, req.x, cfg);
            case Method::ClosedForm:
                return prelimit_closed_form_cdf(req.model, req.which, req.t, req.x);
            case Method::Series:
                throw UnsupportedModel("series method is only defined for the independent model");
            }
            return 0.0;
        }
    };
    return std::visit(Visitor{req, cfg}, req.model);
}

} // namespace ctrm

#endif
