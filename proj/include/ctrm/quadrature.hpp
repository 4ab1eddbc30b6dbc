#ifndef CTRM_QUADRATURE_HPP
#define CTRM_QUADRATURE_HPP

// Thin facade over Boost.Math quadrature. Every integral in the library goes
// through these three entry points so tolerances and substitutions live in one place.

#include <cmath>
#include <limits>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "ctrm/error.hpp"

namespace ctrm::quad {

inline constexpr unsigned kMaxDepth = 18;

/// Adaptive Gauss-Kronrod (15/31 point) on a finite interval with smooth integrand.
/// The interval is mapped onto [0, 1] first: Boost 1.74 compares the unscaled
/// local error with the scaled estimate, so short intervals never terminate.
template <class F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-12) {
    if (!(b > a)) {
        return 0.0;
    }
    const double width = b - a;
    auto unit = [&](double s) { return f(a + width * s); };
    double err = 0.0;
    return width *
           boost::math::quadrature::gauss_kronrod<double, 31>::integrate(unit, 0.0, 1.0, kMaxDepth, rel_tol, &err);
}

/// Double-exponential rule on a finite interval for integrands that are
/// bounded but not smooth at the endpoints, such as s^p with 1 < p < 2.
template <class F>
double integrate_rough_ends(F&& f, double a, double b, double rel_tol = 1e-12) {
    if (!(b > a)) {
        return 0.0;
    }
    thread_local boost::math::quadrature::tanh_sinh<double> integrator;
    const double width = b - a;
    auto unit = [&](double s) { return f(a + width * s); };
    double err = 0.0;
    double l1 = 0.0;
    std::size_t levels = 0;
    const double value = integrator.integrate(unit, 0.0, 1.0, rel_tol, &err, &l1, &levels);
    if (!std::isfinite(value)) {
        throw AccuracyError("integrate_rough_ends: non-finite result");
    }
    return width * value;
}

/// Integral over [a, +inf) of a function that decays at least algebraically.
template <class F>
double integrate_to_infinity(F&& f, double a, double rel_tol = 1e-12) {
    thread_local boost::math::quadrature::exp_sinh<double> integrator;
    double err = 0.0;
    double l1 = 0.0;
    std::size_t levels = 0;
    const double value =
        integrator.integrate(f, a, std::numeric_limits<double>::infinity(), rel_tol, &err, &l1, &levels);
    if (!std::isfinite(value)) {
        throw AccuracyError("integrate_to_infinity: non-finite result");
    }
    return value;
}

/// Integral of (u-a)^(lambda-1) (b-u)^(mu-1) h(u) over [a, b] for smooth h and
/// lambda, mu > 0. The interval is split at its midpoint m; on [a, m] the
/// substitution u = a + (m-a) s^(1/lambda) absorbs the left weight, on [m, b]
/// u = b - (b-m) s^(1/mu) absorbs the right one. Both halves become smooth
/// integrals over s in [0, 1], up to s^(1/lambda - 1) type behaviour at s = 0
/// that the double-exponential rule absorbs.
template <class H>
double integrate_beta_weighted(H&& h, double a, double b, double lambda, double mu,
                               double rel_tol = 1e-12) {
    if (!(lambda > 0.0) || !(mu > 0.0)) {
        throw DomainError("integrate_beta_weighted: exponents must be positive");
    }
    if (!(b > a)) {
        return 0.0;
    }
    const double m = 0.5 * (a + b);
    const double half = m - a;

    auto left = [&](double s) {
        if (s <= 0.0) {
            s = std::numeric_limits<double>::min();
        }
        const double u = a + half * std::pow(s, 1.0 / lambda);
        return h(u) * std::pow(b - u, mu - 1.0);
    };
    auto right = [&](double s) {
        if (s <= 0.0) {
            s = std::numeric_limits<double>::min();
        }
        const double u = b - half * std::pow(s, 1.0 / mu);
        return h(u) * std::pow(u - a, lambda - 1.0);
    };
    const double left_part = std::pow(half, lambda) / lambda * integrate_rough_ends(left, 0.0, 1.0, rel_tol);
    const double right_part = std::pow(half, mu) / mu * integrate_rough_ends(right, 0.0, 1.0, rel_tol);
    return left_part + right_part;
}

} // namespace ctrm::quad

#endif
