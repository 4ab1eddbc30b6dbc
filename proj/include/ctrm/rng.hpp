#ifndef CTRM_RNG_HPP
#define CTRM_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <variant>

#include "ctrm/model.hpp"

namespace ctrm {

/// Deterministic uniform stream keyed by (seed, stream-id).
///
/// Equal keys give bit-identical sequences; distinct stream-ids are used for
/// independent chunks of a Monte-Carlo run, so results never depend on which
/// thread consumed which chunk.
class SeededStream {
public:
    SeededStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_id_(stream_id) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream_id),
                          static_cast<std::uint32_t>(stream_id >> 32), 0x43545251u};
        engine_.seed(seq);
    }

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] std::uint64_t stream_id() const noexcept { return stream_id_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform() {
        constexpr double scale = 0x1.0p-53;
        for (;;) {
            const double u = static_cast<double>(next_u64() >> 11) * scale;
            if (u > 0.0) {
                return u;
            }
        }
    }

    /// Standard exponential variate.
    double exponential() { return -std::log(uniform()); }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
};

/// Positive beta-stable variate with E exp(-s W) = exp(-s^beta).
/// Kanter's representation: W = (A(U) / E)^((1-beta)/beta), U ~ Unif(0, pi), E ~ Exp(1),
/// A(u) = (sin(beta u) / sin u)^(1/(1-beta)) sin((1-beta) u) / sin(beta u).
inline double kanter_a(double beta, double u) {
    const double s_bu = std::sin(beta * u);
    return std::pow(s_bu / std::sin(u), 1.0 / (1.0 - beta)) * std::sin((1.0 - beta) * u) / s_bu;
}

inline double sample_stable_subordinator(StableIndex beta, SeededStream& stream) {
    const double b = beta.value();
    const double u = std::numbers::pi * stream.uniform();
    const double e = stream.exponential();
    return std::pow(kanter_a(b, u) / e, (1.0 - b) / b);
}

/// Frechet variate by inversion, Z = (-ln u)^(-1/shape).
inline double frechet_from_uniform(FrechetShape shape, double u) {
    return std::pow(-std::log(u), -1.0 / shape.value());
}

inline double sample_frechet(FrechetShape shape, SeededStream& stream) {
    return frechet_from_uniform(shape, stream.uniform());
}

struct WaitJump {
    double wait;
    double jump;
};

inline double sample_jump(JumpLaw law, SeededStream& stream) {
    switch (law) {
    case JumpLaw::StandardPareto:
        return 1.0 / stream.uniform();
    }
    return 0.0;
}

inline WaitJump sample_pair(const ModelSpec& model, SeededStream& stream) {
    struct Visitor {
        SeededStream& s;
        WaitJump operator()(const IndependentStableFrechet& m) const {
            const double w = sample_stable_subordinator(m.beta, s);
            return {w, sample_frechet(m.alpha, s)};
        }
        WaitJump operator()(const CoupledProductFrechet& m) const {
            const double w = sample_stable_subordinator(m.beta, s);
            const double z = sample_frechet(m.gamma, s);
            return {w, std::pow(w, 1.0 / m.gamma.value()) * z};
        }
        WaitJump operator()(const ExponentialIndependent& m) const {
            const double w = s.exponential() / m.rate;
            return {w, sample_jump(m.jumps, s)};
        }
    };
    return std::visit(Visitor{stream}, model);
}

} // namespace ctrm

#endif
