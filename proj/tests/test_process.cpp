#include <cmath>
#include <cstddef>
#include <vector>

#include <gtest/gtest.h>

#include "ctrm/limits.hpp"
#include "ctrm/process.hpp"
#include "test_support.hpp"

namespace {

using namespace ctrm;
using ctrm::testing::ks_statistic;

PathRealization hand_path() {
    const std::vector<WaitJump> pairs{{1.0, 3.0}, {2.0, 1.0}, {1.0, 5.0}};
    return build_path(pairs);
}

TEST(BuildPath, PrefixSumsAndMaxima) {
    const PathRealization path = hand_path();
    ASSERT_EQ(path.size(), 3u);
    const std::vector<double> sums(path.cum_sums().begin(), path.cum_sums().end());
    const std::vector<double> maxima(path.run_max().begin(), path.run_max().end());
    EXPECT_EQ(sums, (std::vector<double>{1.0, 3.0, 4.0}));
    EXPECT_EQ(maxima, (std::vector<double>{3.0, 3.0, 5.0}));
    EXPECT_EQ(path.waits().size(), path.jumps().size());
}

TEST(BuildPath, SinglePairAndEmpty) {
    const std::vector<WaitJump> one{{2.5, -1.0}};
    const PathRealization path = build_path(one);
    EXPECT_EQ(path.cum_sums()[0], 2.5);
    EXPECT_EQ(path.run_max()[0], -1.0);
    EXPECT_TRUE(build_path(std::vector<WaitJump>{}).empty());
}

TEST(BuildPath, RejectsNonPositiveWaits) {
    const std::vector<WaitJump> bad{{1.0, 1.0}, {0.0, 2.0}};
    EXPECT_THROW(build_path(bad), DomainError);
}

TEST(RenewalCount, HandPath) {
    const PathRealization path = hand_path();
    EXPECT_EQ(renewal_count(path, 2.5), 1u);
    EXPECT_EQ(renewal_count(path, 4.0), 3u);
    EXPECT_EQ(renewal_count(path, 0.5), 0u);
    EXPECT_EQ(renewal_count(path, 0.0), 0u);
    EXPECT_THROW(renewal_count(path, 4.5), PathExhausted);
    EXPECT_THROW(renewal_count(path, -1.0), DomainError);
}

TEST(CtrmValues, HandPath) {
    const PathRealization path = hand_path();
    EXPECT_EQ(ctrm_value(path, 2.5), 3.0);
    EXPECT_EQ(octrm_value(path, 2.5), 3.0);
    EXPECT_EQ(ctrm_value(path, 3.5), 3.0);
    EXPECT_EQ(octrm_value(path, 3.5), 5.0);
    EXPECT_EQ(ctrm_value(path, 0.5), kEmptyMax);
    EXPECT_TRUE(std::isinf(ctrm_value(path, 0.5)) && ctrm_value(path, 0.5) < 0.0);
    EXPECT_EQ(octrm_value(path, 0.5), 3.0);
    EXPECT_EQ(ctrm_value(path, 4.0), 5.0);
    EXPECT_THROW(octrm_value(path, 4.0), PathExhausted);
}

TEST(CtrmValues, PathProperties) {
    SeededStream s(8, 0);
    const ModelSpec model = CoupledProductFrechet{StableIndex(0.6), FrechetShape(1.2)};
    std::vector<WaitJump> pairs(2000);
    for (auto& p : pairs) {
        p = sample_pair(model, s);
    }
    const PathRealization path = build_path(pairs);
    const auto sums = path.cum_sums();
    for (std::size_t n = 1; n <= path.size(); ++n) {
        ASSERT_EQ(renewal_count(path, sums[n - 1]), n);
    }
    const double horizon = sums[path.size() - 2];
    double prev_v = kEmptyMax;
    double prev_u = kEmptyMax;
    for (int i = 0; i <= 500; ++i) {
        const double t = horizon * i / 500.0 * (1.0 - 1e-12);
        const double v = ctrm_value(path, t);
        const double u = octrm_value(path, t);
        ASSERT_GE(u, v);
        ASSERT_GE(v, prev_v);
        ASSERT_GE(u, prev_u);
        prev_v = v;
        prev_u = u;
    }
}

TEST(SimulateAt, AgreesWithStoredPath) {
    const ModelSpec model = IndependentStableFrechet{StableIndex(0.5), FrechetShape(1.0)};
    SeededStream streamed(3, 4);
    const CtrmOctrm v = simulate_at(model, 50.0, streamed);

    SeededStream replay(3, 4);
    std::vector<WaitJump> pairs;
    double sum = 0.0;
    while (sum <= 50.0) {
        pairs.push_back(sample_pair(model, replay));
        sum += pairs.back().wait;
    }
    const PathRealization path = build_path(pairs);
    EXPECT_EQ(v.ctrm, ctrm_value(path, 50.0));
    EXPECT_EQ(v.octrm, octrm_value(path, 50.0));
}

TEST(RescaledSample, PathwiseDominationOnSameStream) {
    for (const ModelSpec& model : {ModelSpec{CoupledProductFrechet{StableIndex(0.5), FrechetShape(1.0)}},
                                   ModelSpec{IndependentStableFrechet{StableIndex(0.4), FrechetShape(2.0)}},
                                   ModelSpec{ExponentialIndependent(1.0)}}) {
        SeededStream s(17, 0);
        for (int i = 0; i < 5000; ++i) {
            const CtrmOctrm p = rescaled_pair(model, 100.0, 1.0, s);
            ASSERT_GE(p.octrm, p.ctrm);
        }
    }
}

TEST(RescaledSample, RejectsBadArguments) {
    SeededStream s(1, 0);
    const ModelSpec model = ExponentialIndependent(1.0);
    EXPECT_THROW(rescaled_sample(model, 0.5, 1.0, Which::Ctrm, s), DomainError);
    EXPECT_THROW(rescaled_sample(model, 1.0, 0.0, Which::Ctrm, s), DomainError);
}

TEST(RescaledSample, CoupledApproachesLimitCdf) {
    const ModelSpec model = CoupledProductFrechet{StableIndex(0.5), FrechetShape(1.0)};
    SeededStream s(20261018, 0);
    std::vector<double> v(100000);
    for (auto& x : v) {
        x = rescaled_sample(model, 1e4, 1.0, Which::Ctrm, s);
    }
    EXPECT_LT(ks_statistic(v, [](double x) { return x > 0.0 ? coupled_ctrm_cdf(0.5, 1.0, 1.0, x) : 0.0; }), 0.05);
}

TEST(RescaledSample, ExponentialPoissonMaxIdentity) {
    const ModelSpec model = ExponentialIndependent(1.0);
    constexpr std::size_t n = 100000;
    SeededStream s(5, 0);
    std::vector<double> v(n);
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) {
        const CtrmOctrm p = rescaled_pair(model, 1.0, 1.0, s);
        v[i] = p.ctrm;
        u[i] = p.octrm;
    }
    std::size_t below = 0;
    for (double x : v) {
        below += x <= 2.0;
    }
    const double p = std::exp(-0.5);
    EXPECT_NEAR(static_cast<double>(below) / n, p, 3.0 * std::sqrt(p * (1.0 - p) / n));

    auto fj = [](double x) { return jump_cdf(JumpLaw::StandardPareto, x); };
    EXPECT_LT(ks_statistic(v, [&](double x) { return std::exp(-(1.0 - fj(x))); }), 0.01);
    EXPECT_LT(ks_statistic(u, [&](double x) { return fj(x) * std::exp(-(1.0 - fj(x))); }), 0.01);
}

} // namespace
