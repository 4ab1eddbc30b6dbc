#ifndef CTRM_MODEL_HPP
#define CTRM_MODEL_HPP

#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <variant>

#include "ctrm/error.hpp"
#include "ctrm/quadrature.hpp"

namespace ctrm {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Index of the positive stable law of the waiting-time limit, 0 < beta < 1.
class StableIndex {
public:
    explicit StableIndex(double beta) : beta_(beta) {
        if (!(beta > 0.0 && beta < 1.0)) {
            throw DomainError("stable index must lie in (0, 1), got " + std::to_string(beta));
        }
    }
    [[nodiscard]] double value() const noexcept { return beta_; }

private:
    double beta_;
};

/// Shape of a Frechet law exp(-x^-shape), shape > 0.
class FrechetShape {
public:
    explicit FrechetShape(double shape) : shape_(shape) {
        if (!(shape > 0.0) || !std::isfinite(shape)) {
            throw DomainError("Frechet shape must be positive, got " + std::to_string(shape));
        }
    }
    [[nodiscard]] double value() const noexcept { return shape_; }

private:
    double shape_;
};

/// Waits and jumps independent: W beta-stable, J alpha-Frechet.
struct IndependentStableFrechet {
    StableIndex beta;
    FrechetShape alpha;
};

/// W beta-stable, J = W^(1/gamma) Z with Z gamma-Frechet independent of W.
struct CoupledProductFrechet {
    StableIndex beta;
    FrechetShape gamma;
};

enum class JumpLaw { StandardPareto };

/// Pre-limit model with exponential waits and independent jumps; no scaling limit is attached.
struct ExponentialIndependent {
    double rate = 1.0;
    JumpLaw jumps = JumpLaw::StandardPareto;

    explicit ExponentialIndependent(double r = 1.0, JumpLaw law = JumpLaw::StandardPareto)
        : rate(r), jumps(law) {
        if (!(r > 0.0) || !std::isfinite(r)) {
            throw DomainError("exponential rate must be positive");
        }
    }
};

using ModelSpec = std::variant<IndependentStableFrechet, CoupledProductFrechet, ExponentialIndependent>;

inline std::string_view model_name(const ModelSpec& model) {
    struct Visitor {
        std::string_view operator()(const IndependentStableFrechet&) const { return "independent"; }
        std::string_view operator()(const CoupledProductFrechet&) const { return "coupled"; }
        std::string_view operator()(const ExponentialIndependent&) const { return "exponential"; }
    };
    return std::visit(Visitor{}, model);
}

inline bool is_limit_model(const ModelSpec& model) {
    return !std::holds_alternative<ExponentialIndependent>(model);
}

/// CDF of the jump law of the exponential pre-limit model.
inline double jump_cdf(JumpLaw law, double x) {
    switch (law) {
    case JumpLaw::StandardPareto:
        return x < 1.0 ? 0.0 : 1.0 - 1.0 / x;
    }
    return 0.0;
}

/// C-L exponent Psi(xi, x) of a sum-max-stable limit together with its marginals.
///
/// psi(xi, +inf) == psi_D(xi) and psi(0, x) == -log_FA(x). Below the left
/// endpoint x0 the exponent is +inf, so CDF-valued transforms built from it
/// vanish there instead of raising.
class ClExponent {
public:
    explicit ClExponent(const IndependentStableFrechet& m) : kind_(Kind::Independent), beta_(m.beta.value()), shape_(m.alpha.value()) {}
    explicit ClExponent(const CoupledProductFrechet& m) : kind_(Kind::Coupled), beta_(m.beta.value()), shape_(m.gamma.value()) {}

    template <class R = double>
    [[nodiscard]] R psi(R xi, R x) const {
        using std::pow;
        if (!(x > R(left_endpoint()))) {
            return std::numeric_limits<R>::infinity();
        }
        const R q = pow(x, -R(shape_));
        if (kind_ == Kind::Independent) {
            return pow(xi, R(beta_)) + q;
        }
        return pow(xi + q, R(beta_));
    }

    template <class R = double>
    [[nodiscard]] R psi_D(R xi) const {
        using std::pow;
        return pow(xi, R(beta_));
    }

    /// log F_A(x) (nonpositive).
    template <class R = double>
    [[nodiscard]] R log_FA(R x) const {
        using std::pow;
        if (!(x > R(left_endpoint()))) {
            return -std::numeric_limits<R>::infinity();
        }
        const R exponent = kind_ == Kind::Independent ? R(shape_) : R(beta_ * shape_);
        return -pow(x, -exponent);
    }

    [[nodiscard]] double left_endpoint() const noexcept { return 0.0; }
    [[nodiscard]] double right_endpoint() const noexcept { return kInf; }
    [[nodiscard]] double beta() const noexcept { return beta_; }

private:
    enum class Kind { Independent, Coupled };
    Kind kind_;
    double beta_;
    double shape_;
};

inline ClExponent cl_exponent(const ModelSpec& model) {
    if (const auto* m = std::get_if<IndependentStableFrechet>(&model)) {
        return ClExponent(*m);
    }
    if (const auto* m = std::get_if<CoupledProductFrechet>(&model)) {
        return ClExponent(*m);
    }
    throw UnsupportedModel("cl_exponent: the exponential pre-limit model has no limit exponent");
}

/// Phi((t, inf) x [0, x]) for the coupled Frechet family:
/// int_t^inf exp(-r x^-gamma) beta / Gamma(1-beta) r^(-beta-1) dr, with r = t + tau.
inline double exponent_measure_tail(const ModelSpec& model, double t, double x) {
    const auto* m = std::get_if<CoupledProductFrechet>(&model);
    if (m == nullptr) {
        throw UnsupportedModel("exponent_measure_tail: only the coupled Frechet model has a closed Levy measure");
    }
    if (!(t > 0.0) || !(x > 0.0)) {
        throw DomainError("exponent_measure_tail: need t > 0 and x > 0");
    }
    const double beta = m->beta.value();
    const double q = std::isinf(x) ? 0.0 : std::pow(x, -m->gamma.value());
    auto integrand = [&](double tau) {
        return std::exp(-tau * q) * std::pow(t + tau, -beta - 1.0);
    };
    const double integral = quad::integrate_to_infinity(integrand, 0.0, 1e-12);
    return std::exp(-t * q) * beta / std::tgamma(1.0 - beta) * integral;
}

/// Norming sequences of the sum-max domain of attraction and the induced
/// time-scaling functions a~(c), b~(c), d~(c) for the CTRM scaling limit.
class ScalingSequences {
public:
    ScalingSequences(double beta, double max_exponent) : beta_(beta), max_exponent_(max_exponent) {}

    [[nodiscard]] double a(double n) const { return std::pow(n, -1.0 / beta_); }
    [[nodiscard]] double b(double n) const { return std::pow(n, -1.0 / max_exponent_); }
    [[nodiscard]] double d(double) const { return 0.0; }

    /// a~(c) = c^beta so that 1 / a(a~(c)) == c exactly.
    [[nodiscard]] double a_tilde(double c) const { return std::pow(c, beta_); }
    [[nodiscard]] double b_tilde(double c) const { return b(a_tilde(c)); }
    [[nodiscard]] double d_tilde(double) const { return 0.0; }

private:
    double beta_;
    double max_exponent_; // index of the Frechet limit of the maxima
};

inline ScalingSequences scaling(const ModelSpec& model) {
    if (const auto* m = std::get_if<IndependentStableFrechet>(&model)) {
        return {m->beta.value(), m->alpha.value()};
    }
    if (const auto* m = std::get_if<CoupledProductFrechet>(&model)) {
        return {m->beta.value(), m->beta.value() * m->gamma.value()};
    }
    throw UnsupportedModel("scaling: the exponential pre-limit model has no norming sequences");
}

} // namespace ctrm

#endif
