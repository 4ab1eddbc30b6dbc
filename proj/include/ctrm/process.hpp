#ifndef CTRM_PROCESS_HPP
#define CTRM_PROCESS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "ctrm/model.hpp"
#include "ctrm/rng.hpp"

namespace ctrm {

/// Value of an empty maximum, M(0). Compares below every real jump.
inline constexpr double kEmptyMax = -kInf;

enum class Which { Ctrm, Octrm };

/// One realisation of (W_i, J_i) with S(n) = sum of waits and M(n) = running max of jumps.
/// Index i of each vector corresponds to n = i + 1.
class PathRealization {
public:
    PathRealization() = default;

    [[nodiscard]] std::size_t size() const noexcept { return waits_.size(); }
    [[nodiscard]] bool empty() const noexcept { return waits_.empty(); }
    [[nodiscard]] std::span<const double> waits() const noexcept { return waits_; }
    [[nodiscard]] std::span<const double> jumps() const noexcept { return jumps_; }
    [[nodiscard]] std::span<const double> cum_sums() const noexcept { return cum_sums_; }
    [[nodiscard]] std::span<const double> run_max() const noexcept { return run_max_; }

    /// M(n) with M(0) = -inf.
    [[nodiscard]] double max_through(std::size_t n) const { return n == 0 ? kEmptyMax : run_max_.at(n - 1); }

    void push_back(WaitJump p) {
        if (!(p.wait > 0.0)) {
            throw DomainError("build_path: waiting times must be positive");
        }
        const double s = cum_sums_.empty() ? p.wait : cum_sums_.back() + p.wait;
        const double m = run_max_.empty() ? p.jump : std::max(run_max_.back(), p.jump);
        waits_.push_back(p.wait);
        jumps_.push_back(p.jump);
        cum_sums_.push_back(s);
        run_max_.push_back(m);
    }

private:
    std::vector<double> waits_;
    std::vector<double> jumps_;
    std::vector<double> cum_sums_;
    std::vector<double> run_max_;
};

inline PathRealization build_path(std::span<const WaitJump> pairs) {
    PathRealization path;
    for (const auto& p : pairs) {
        path.push_back(p);
    }
    return path;
}

/// N(t) = max{n >= 0 : S(n) <= t}.
inline std::size_t renewal_count(const PathRealization& path, double t) {
    if (t < 0.0) {
        throw DomainError("renewal_count: t must be nonnegative");
    }
    const auto sums = path.cum_sums();
    if (sums.empty() || t > sums.back()) {
        throw PathExhausted("renewal_count: t lies beyond the last renewal epoch of the path");
    }
    return static_cast<std::size_t>(std::upper_bound(sums.begin(), sums.end(), t) - sums.begin());
}

/// V(t) = M(N(t)).
inline double ctrm_value(const PathRealization& path, double t) {
    return path.max_through(renewal_count(path, t));
}

/// U(t) = M(N(t) + 1).
inline double octrm_value(const PathRealization& path, double t) {
    const std::size_t n = renewal_count(path, t);
    if (n + 1 > path.size()) {
        throw PathExhausted("octrm_value: path ends at the renewal epoch t");
    }
    return path.max_through(n + 1);
}

/// V(horizon) and U(horizon) read off the same streamed path.
struct CtrmOctrm {
    double ctrm;
    double octrm;
};

/// Streams pairs until the cumulative wait exceeds the horizon and returns
/// the maxima before and including the straddling pair. Nothing is stored.
inline CtrmOctrm simulate_at(const ModelSpec& model, double horizon, SeededStream& stream) {
    double sum = 0.0;
    double running = kEmptyMax;
    for (;;) {
        const WaitJump p = sample_pair(model, stream);
        sum += p.wait;
        const double previous = running;
        running = std::max(running, p.jump);
        if (sum > horizon) {
            return {previous, running};
        }
    }
}

/// b~(c)(V(ct) - d~(c)) and its OCTRM analogue from one path. For the
/// exponential pre-limit model no norming exists and the raw values are returned.
inline CtrmOctrm rescaled_pair(const ModelSpec& model, double c, double t, SeededStream& stream) {
    if (!(c >= 1.0)) {
        throw DomainError("rescaled_sample: c must be >= 1");
    }
    if (!(t > 0.0)) {
        throw DomainError("rescaled_sample: t must be positive");
    }
    const CtrmOctrm raw = simulate_at(model, c * t, stream);
    if (!is_limit_model(model)) {
        return raw;
    }
    const ScalingSequences seq = scaling(model);
    const double b = seq.b_tilde(c);
    const double d = seq.d_tilde(c);
    auto rescale = [&](double v) { return std::isinf(v) ? v : b * (v - d); };
    return {rescale(raw.ctrm), rescale(raw.octrm)};
}

inline double rescaled_sample(const ModelSpec& model, double c, double t, Which which, SeededStream& stream) {
    const CtrmOctrm v = rescaled_pair(model, c, t, stream);
    return which == Which::Ctrm ? v.ctrm : v.octrm;
}

} // namespace ctrm

#endif
