#include <cmath>
#include <cstddef>
#include <vector>

#include <gtest/gtest.h>

#include "ctrm/rng.hpp"
#include "test_support.hpp"

namespace {

using namespace ctrm;
using ctrm::testing::kendall_tau;
using ctrm::testing::ks_statistic;

constexpr std::size_t kDraws = 100000;

ModelSpec coupled(double beta, double gamma) { return CoupledProductFrechet{StableIndex(beta), FrechetShape(gamma)}; }

TEST(SeededStream, EqualKeysGiveIdenticalSequences) {
    SeededStream a(123, 9);
    SeededStream b(123, 9);
    for (int i = 0; i < 1000; ++i) {
        ASSERT_EQ(a.next_u64(), b.next_u64());
    }
}

TEST(SeededStream, DistinctStreamsDiffer) {
    SeededStream a(123, 0);
    SeededStream b(123, 1);
    SeededStream c(124, 0);
    int same_b = 0;
    int same_c = 0;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u64();
        same_b += x == b.next_u64();
        same_c += x == c.next_u64();
    }
    EXPECT_EQ(same_b, 0);
    EXPECT_EQ(same_c, 0);
}

TEST(SeededStream, UniformsInOpenUnitInterval) {
    SeededStream s(5, 5);
    double sum = 0.0;
    for (std::size_t i = 0; i < kDraws; ++i) {
        const double u = s.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    EXPECT_NEAR(sum / kDraws, 0.5, 3.0 * std::sqrt(1.0 / 12.0 / kDraws));
}

TEST(StableSampler, HalfStableMatchesLevyCdf) {
    SeededStream s(2024, 0);
    std::vector<double> w(kDraws);
    for (auto& v : w) {
        v = sample_stable_subordinator(StableIndex(0.5), s);
        ASSERT_GT(v, 0.0);
    }
    const double d = ks_statistic(w, [](double t) { return std::erfc(1.0 / (2.0 * std::sqrt(t))); });
    EXPECT_LT(d, 0.01);
}

TEST(StableSampler, LaplaceTransformAtOne) {
    SeededStream s(77, 3);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < kDraws; ++i) {
        const double v = std::exp(-sample_stable_subordinator(StableIndex(0.7), s));
        sum += v;
        sum_sq += v * v;
    }
    const double mean = sum / kDraws;
    const double se = std::sqrt((sum_sq / kDraws - mean * mean) / kDraws);
    EXPECT_NEAR(mean, std::exp(-1.0), 3.0 * se);
}

TEST(StableSampler, PositiveForAllIndices) {
    SeededStream s(1, 1);
    for (double beta : {0.05, 0.3, 0.5, 0.9, 0.99}) {
        for (int i = 0; i < 20000; ++i) {
            ASSERT_GT(sample_stable_subordinator(StableIndex(beta), s), 0.0) << beta;
        }
    }
}

TEST(FrechetSampler, InverseTransformPoint) {
    EXPECT_DOUBLE_EQ(frechet_from_uniform(FrechetShape(1.0), std::exp(-1.0)), 1.0);
}

TEST(FrechetSampler, ShapeTwoMatchesCdf) {
    SeededStream s(31, 0);
    std::vector<double> z(kDraws);
    for (auto& v : z) {
        v = sample_frechet(FrechetShape(2.0), s);
        ASSERT_GT(v, 0.0);
    }
    EXPECT_LT(ks_statistic(z, [](double x) { return std::exp(-1.0 / (x * x)); }), 0.01);
}

TEST(SamplePair, CoupledJumpIsBetaGammaFrechet) {
    SeededStream s(11, 0);
    std::vector<double> j(kDraws);
    for (auto& v : j) {
        const WaitJump p = sample_pair(coupled(0.5, 1.0), s);
        ASSERT_GT(p.wait, 0.0);
        ASSERT_GT(p.jump, 0.0);
        v = p.jump;
    }
    EXPECT_LT(ks_statistic(j, [](double x) { return std::exp(-std::pow(x, -0.5)); }), 0.01);
}

TEST(SamplePair, ExponentialWaitTail) {
    SeededStream s(12, 0);
    std::size_t above = 0;
    std::vector<double> jumps(kDraws);
    for (std::size_t i = 0; i < kDraws; ++i) {
        const WaitJump p = sample_pair(ExponentialIndependent(1.0), s);
        above += p.wait > 1.0;
        jumps[i] = p.jump;
    }
    const double p_hat = static_cast<double>(above) / kDraws;
    const double p = std::exp(-1.0);
    EXPECT_NEAR(p_hat, p, 3.0 * std::sqrt(p * (1.0 - p) / kDraws));
    EXPECT_LT(ks_statistic(jumps, [](double x) { return jump_cdf(JumpLaw::StandardPareto, x); }), 0.01);
}

TEST(SamplePair, KendallTauSeparatesCoupledFromIndependent) {
    auto tau = [](const ModelSpec& model) {
        SeededStream s(99, 0);
        std::vector<double> w(kDraws);
        std::vector<double> j(kDraws);
        for (std::size_t i = 0; i < kDraws; ++i) {
            const WaitJump p = sample_pair(model, s);
            w[i] = p.wait;
            j[i] = p.jump;
        }
        return kendall_tau(w, j);
    };
    EXPECT_GT(tau(coupled(0.5, 1.0)), 0.1);
    EXPECT_NEAR(tau(IndependentStableFrechet{StableIndex(0.5), FrechetShape(1.0)}), 0.0, 0.01);
}

TEST(SamplePair, ReproducibleForEqualKeys) {
    for (const ModelSpec& model :
         {coupled(0.3, 2.0), ModelSpec{IndependentStableFrechet{StableIndex(0.7), FrechetShape(1.5)}},
          ModelSpec{ExponentialIndependent(2.0)}}) {
        SeededStream a(42, 7);
        SeededStream b(42, 7);
        for (int i = 0; i < 1000; ++i) {
            const WaitJump p = sample_pair(model, a);
            const WaitJump q = sample_pair(model, b);
            ASSERT_EQ(p.wait, q.wait);
            ASSERT_EQ(p.jump, q.jump);
        }
    }
}

TEST(KendallTauHelper, MatchesQuadraticCount) {
    const std::vector<double> x{0.3, 1.2, -0.5, 2.2, 0.9, 4.0, 3.1};
    const std::vector<double> y{1.0, 0.2, -1.0, 3.0, 0.1, 2.5, 2.7};
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t k = i + 1; k < x.size(); ++k) {
            s += ((x[i] - x[k]) * (y[i] - y[k]) > 0.0) ? 1.0 : -1.0;
        }
    }
    EXPECT_NEAR(kendall_tau(x, y), s / 21.0, 1e-15);
}

} // namespace
