#include "sparse_ias/errors.hpp"
#include "sparse_ias/hyperprior.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

using sias::HyperParams;
using sias::Vector;

namespace {

HyperParams unit_scale(double r, double beta, std::size_t n = 1) { return HyperParams::from_beta(r, beta, Vector(n, 1.0)); }

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// (r, beta) pairs for the theta-update grid; all admissible.
struct RBeta {
    double r;
    double beta;
};
const RBeta kGrid[] = {{-1.0, 1.0}, {-0.5, 1.0}, {0.5, 3.002}, {0.75, 2.01}, {1.0, 1.5001}, {2.0, 0.8}};

TEST(HyperParams, EtaAndAdmissibility) {
    const auto p = unit_scale(0.5, 3.002);
    EXPECT_NEAR(p.eta(), 1e-3, 1e-15);
    EXPECT_TRUE(p.admissible());
    EXPECT_FALSE(p.globally_convex());
    EXPECT_TRUE(unit_scale(1.0, 1.5001).globally_convex());
    EXPECT_THROW(unit_scale(0.0, 1.0), sias::ParameterError);
    EXPECT_THROW(unit_scale(1.0, 0.0), sias::ParameterError);
    EXPECT_THROW(unit_scale(1.0, -1.0), sias::ParameterError);
    EXPECT_THROW(unit_scale(1.0, 1.0), sias::ParameterError);  // eta < 0 with r > 0
}

TEST(HyperParams, NegativeRNeedsNegativeEta) {
    // r < 0 gives eta = r beta - 3/2 < 0 for every beta > 0, so every r < 0 set is admissible.
    EXPECT_TRUE(unit_scale(-1.0, 3.0).admissible());
    EXPECT_TRUE(unit_scale(-0.5, 0.1).admissible());
}

TEST(HyperParams, RejectsBadScales) {
    EXPECT_THROW(HyperParams::from_beta(1.0, 2.0, Vector{1.0, 0.0}), sias::ParameterError);
    EXPECT_THROW(HyperParams::from_beta(1.0, 2.0, Vector{1.0, -1.0}), sias::ParameterError);
    EXPECT_THROW(HyperParams::from_beta(1.0, 2.0, Vector{std::numeric_limits<double>::infinity()}),
                 sias::ParameterError);
}

TEST(PhiZero, Examples) {
    EXPECT_NEAR(sias::phi_zero(HyperParams::from_eta(1.0, 1e-4, {1.0})), 1e-4, 1e-18);
    EXPECT_NEAR(sias::phi_zero(unit_scale(-1.0, 1.0)), 0.4, 1e-15);
    EXPECT_NEAR(sias::phi_zero(HyperParams::from_eta(0.5, 1e-3, {1.0})), 4e-6, 1e-18);
}

TEST(PhiZero, BoundaryEtaIsInadmissible) {
    const auto p = unit_scale(0.5, 3.0);
    EXPECT_EQ(p.eta(), 0.0);
    EXPECT_FALSE(p.admissible());
    EXPECT_THROW(sias::phi_zero(p), sias::ParameterError);
}

TEST(ThetaUpdate, Examples) {
    EXPECT_NEAR(sias::theta_update(0.0, 1.0, HyperParams::from_eta(1.0, 1e-4, {1.0})), 1e-4, 1e-18);
    EXPECT_NEAR(sias::theta_update(1.0, 1.0, unit_scale(-1.0, 1.0)), 0.6, 1e-15);
    const auto p = HyperParams::from_eta(0.5, 1e-3, {1.0});
    const double oracle_theta = oracle::golden_section_theta(0.5, 1.0, 0.5, 1e-3);
    EXPECT_LT(rel(sias::theta_update(0.5, 1.0, p), oracle_theta), 1e-6);
}

TEST(ThetaUpdate, ClosedFormsMatchIndependentFormulas) {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 200; ++t) {
        const double alpha = oracle::random_vector(1, rng, -50.0, 50.0)[0];
        const double scale = std::exp(oracle::random_vector(1, rng, -6.0, 6.0)[0]);
        const auto p1 = HyperParams::from_eta(1.0, 1e-4, {scale});
        EXPECT_LT(rel(sias::theta_update(alpha, scale, p1), oracle::theta_closed_form_r1(alpha, scale, 1e-4)), 1e-12);
        const auto pm = HyperParams::from_beta(-1.0, 1.0, {scale});
        EXPECT_LT(rel(sias::theta_update(alpha, scale, pm), oracle::theta_closed_form_rm1(alpha, scale, 1.0)), 1e-12);
    }
}

TEST(ThetaUpdate, NumericPathAgreesWithClosedForms) {
    for (double z : {1e-3, 0.1, 1.0, 7.5, 100.0, 1e3}) {
        const auto p1 = HyperParams::from_eta(1.0, 1e-2, {1.0});
        double xi = 0.0;
        xi = sias::detail::phi_numeric(z, p1);
        EXPECT_LT(rel(xi, oracle::theta_closed_form_r1(z, 1.0, 1e-2)), 1e-12) << z;
        const auto pm = unit_scale(-1.0, 1.0);
        EXPECT_LT(rel(sias::detail::phi_numeric(z, pm), oracle::theta_closed_form_rm1(z, 1.0, 1.0)), 1e-12) << z;
    }
}

TEST(ThetaUpdate, Errors) {
    const auto p = unit_scale(1.0, 2.0);
    EXPECT_THROW(sias::theta_update(1.0, 0.0, p), sias::ParameterError);
    EXPECT_THROW(sias::theta_update(1.0, -2.0, p), sias::ParameterError);
    // The eta = 0 boundary has a positive stationary point only for alpha != 0.
    EXPECT_THROW(sias::theta_update(0.0, 1.0, unit_scale(0.5, 3.0)), sias::ParameterError);
    EXPECT_GT(sias::theta_update(1.0, 1.0, unit_scale(0.5, 3.0)), 0.0);
}

// Stationarity residual and golden-section agreement over the full grid.
TEST(ThetaUpdate, GridAgainstOracles) {
    for (const auto& g : kGrid) {
        for (double scale : {1e-6, 1e-3, 1.0, 1e3}) {
            for (double alpha : {0.0, 1e-4, 0.01, 0.3, 1.0, 4.0, 50.0, 1e3}) {
                const auto p = HyperParams::from_beta(g.r, g.beta, {scale});
                const double theta = sias::theta_update(alpha, scale, p);
                ASSERT_GT(theta, 0.0);
                EXPECT_LE(sias::stationarity_residual(alpha, theta, scale, p), 1e-10)
                    << "r=" << g.r << " scale=" << scale << " alpha=" << alpha;
                const double ref = oracle::golden_section_theta(alpha, scale, g.r, p.eta());
                EXPECT_LT(rel(theta, ref), 1e-6) << "r=" << g.r << " scale=" << scale << " alpha=" << alpha;
            }
        }
    }
}

TEST(ThetaUpdate, EvenAndIncreasingInAlpha) {
    for (const auto& g : kGrid) {
        const auto p = unit_scale(g.r, g.beta);
        double previous = 0.0;
        for (int k = 0; k <= 60; ++k) {
            const double a = 1e-3 * std::pow(1.2, k);
            const double plus = sias::theta_update(a, 1.0, p);
            EXPECT_EQ(plus, sias::theta_update(-a, 1.0, p));
            EXPECT_GT(plus, previous) << "r=" << g.r << " alpha=" << a;
            previous = plus;
        }
    }
}

TEST(ThetaUpdateBatch, ZeroVectorGivesScaledPhiZero) {
    const Vector scales{0.5, 2.0, 7.0};
    const auto p = HyperParams::from_beta(0.5, 3.002, scales);
    const auto t = sias::theta_update_batch(Vector(3, 0.0), scales, p);
    for (std::size_t j = 0; j < 3; ++j) {
        EXPECT_NEAR(t[j], scales[j] * sias::phi_zero(p), 1e-20);
    }
}

TEST(ThetaUpdateBatch, MatchesElementwiseAndOracle) {
    std::mt19937_64 rng(22);
    for (const auto& g : kGrid) {
        const std::size_t n = 100;
        const auto alpha = oracle::random_vector(n, rng, -3.0, 3.0);
        const auto scales = oracle::random_vector(n, rng, 0.1, 10.0);
        const auto p = HyperParams::from_beta(g.r, g.beta, scales);
        const auto batch = sias::theta_update_batch(alpha, scales, p);
        for (std::size_t j = 0; j < n; ++j) {
            EXPECT_LT(rel(batch[j], sias::theta_update(alpha[j], scales[j], p)), 1e-10);
            EXPECT_LT(rel(batch[j], oracle::golden_section_theta(alpha[j], scales[j], g.r, p.eta())), 1e-6);
        }
    }
}

TEST(ThetaUpdateBatch, PermutationEquivariant) {
    std::mt19937_64 rng(23);
    const std::size_t n = 64;
    auto alpha = oracle::random_vector(n, rng, -2.0, 2.0);
    alpha[5] = alpha[9]; // ties
    alpha[11] = 0.0;
    const auto scales = oracle::random_vector(n, rng, 0.5, 2.0);
    const auto p = HyperParams::from_beta(0.75, 2.01, scales);
    const auto t = sias::theta_update_batch(alpha, scales, p);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    Vector pa(n), ps(n);
    for (std::size_t k = 0; k < n; ++k) {
        pa[k] = alpha[perm[k]];
        ps[k] = scales[perm[k]];
    }
    const auto tp = sias::theta_update_batch(pa, ps, p.with_scale(ps));
    for (std::size_t k = 0; k < n; ++k) {
        EXPECT_LT(rel(tp[k], t[perm[k]]), 1e-12);
    }
}

TEST(ConvexityThreshold, Examples) {
    EXPECT_TRUE(std::isinf(sias::convexity_threshold(HyperParams::from_eta(1.0, 1e-4, {1.0}), 0)));
    EXPECT_LT(rel(sias::convexity_threshold(HyperParams::from_eta(0.5, 1e-3, {1.0}), 0), 1.6e-5), 1e-12);
    EXPECT_LT(rel(sias::convexity_threshold(HyperParams::from_beta(-1.0, 1.0, {2.0}), 0), 1.6), 1e-12);
    EXPECT_TRUE(std::isinf(sias::convexity_threshold(unit_scale(2.0, 0.8), 0)));
}

TEST(ConvexityThreshold, OutsideHypotheses) {
    EXPECT_THROW(sias::convexity_threshold(HyperParams::from_eta(1.0, 0.0, {1.0}), 0), sias::ParameterError);
}

TEST(CompatibleScale, Examples) {
    const auto p1 = HyperParams::from_eta(1.0, 1e-4, {1.0, 3.0});
    const auto same = sias::compatible_scale(p1, p1.r(), p1.beta());
    EXPECT_LT(rel(same[0], 1.0), 1e-12);
    EXPECT_LT(rel(same[1], 3.0), 1e-12);

    const double beta2 = (1e-3 + 1.5) / 0.5;
    const auto s2 = sias::compatible_scale(p1, 0.5, beta2);
    EXPECT_LT(rel(s2[0], 25.0), 1e-12);
    EXPECT_LT(rel(s2[1], 75.0), 1e-12);

    const auto p2 = HyperParams::from_beta(0.5, beta2, s2);
    for (std::size_t j = 0; j < 2; ++j) {
        EXPECT_LT(rel(sias::theta_update(0.0, p1.theta_scale()[j], p1), sias::theta_update(0.0, s2[j], p2)), 1e-12);
    }
}

TEST(CompatibleScale, RoundTrip) {
    std::mt19937_64 rng(24);
    const auto scales = oracle::random_vector(20, rng, 0.01, 100.0);
    for (const auto& a : kGrid) {
        for (const auto& b : kGrid) {
            const auto p1 = HyperParams::from_beta(a.r, a.beta, scales);
            const auto p2 = HyperParams::from_beta(b.r, b.beta, sias::compatible_scale(p1, b.r, b.beta));
            const auto back = sias::compatible_scale(p2, a.r, a.beta);
            for (std::size_t j = 0; j < scales.size(); ++j) {
                EXPECT_LT(rel(back[j], scales[j]), 1e-12);
            }
        }
    }
}

TEST(CompatibleScale, InadmissibleSecondSet) {
    EXPECT_THROW(sias::compatible_scale(unit_scale(1.0, 2.0), 0.5, 3.0), sias::ParameterError);
}

TEST(SensitivityWeights, Examples) {
    const auto ones = sias::sensitivity_weights(sias::dct_synthesis(6));
    for (double v : ones) {
        EXPECT_NEAR(v, 1.0, 1e-12);
    }
    const auto w = sias::sensitivity_weights(sias::cumsum(3));
    EXPECT_NEAR(w[0], 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(w[1], 0.5, 1e-15);
    EXPECT_NEAR(w[2], 1.0, 1e-15);
    const auto w2 = sias::sensitivity_weights(sias::cumsum(3), 2.0);
    for (std::size_t j = 0; j < 3; ++j) {
        EXPECT_NEAR(w2[j], 2.0 * w[j], 1e-15);
    }
}

TEST(SensitivityWeights, Errors) {
    EXPECT_THROW(sias::sensitivity_weights(sias::dense(2, 2, Vector{1, 0, 1, 0})), sias::DegenerateColumnError);
    EXPECT_THROW(sias::sensitivity_weights(sias::identity(2), 0.0), sias::ParameterError);
}

TEST(Penalty, UnitRatioGivesOne) {
    for (const auto& g : kGrid) {
        const Vector scales{0.3, 1.0, 9.0};
        const auto p = HyperParams::from_beta(g.r, g.beta, scales);
        const auto v = sias::penalty(Vector(3, 0.0), scales, p);
        for (double c : v.per_component) {
            EXPECT_NEAR(c, 1.0, 1e-15);
        }
        EXPECT_NEAR(v.total, 3.0, 1e-14);
    }
}

TEST(Penalty, TotalIsSumAndMatchesDirectFormula) {
    std::mt19937_64 rng(25);
    const std::size_t n = 50;
    const auto alpha = oracle::random_vector(n, rng);
    const auto theta = oracle::random_vector(n, rng, 0.01, 3.0);
    const auto scales = oracle::random_vector(n, rng, 0.1, 2.0);
    const auto p = HyperParams::from_beta(0.5, 3.002, scales);
    const auto v = sias::penalty(alpha, theta, p);
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double direct = oracle::penalty_log(alpha[j], std::log(theta[j]), scales[j], 0.5, p.eta());
        EXPECT_LT(rel(v.per_component[j], direct), 1e-12);
        sum += v.per_component[j];
    }
    EXPECT_LT(rel(v.total, sum), 1e-12);
}

TEST(Penalty, Errors) {
    const auto p = unit_scale(1.0, 2.0, 2);
    EXPECT_THROW(sias::penalty(Vector{1, 1}, Vector{1, 0}, p), sias::DomainError);
    EXPECT_THROW(sias::penalty(Vector{1, 1}, Vector{1, -1}, p), sias::DomainError);
    EXPECT_THROW(sias::penalty(Vector{1}, Vector{1, 1}, p), sias::SizeError);
}

TEST(Objective, AddsHalfMisfit) {
    const auto p = unit_scale(1.0, 2.0, 2);
    const Vector alpha{1.0, 2.0};
    const Vector theta{1.0, 1.0};
    // Misfit (3 - 1)^2 + (1 - 2)^2 = 5, penalty at unit ratio: alpha^2 / 2 + 1 each.
    EXPECT_NEAR(sias::objective(alpha, theta, Vector{3.0, 1.0}, sias::identity(2), p), 2.5 + 1.5 + 3.0, 1e-14);
}

double plugged_penalty(const Vector& alpha, const HyperParams& p) {
    const auto theta = sias::theta_update_batch(alpha, p.theta_scale(), p);
    return sias::penalty(alpha, theta, p).total;
}

TEST(PenaltyLimits, L1SingleComponent) {
    EXPECT_NEAR(plugged_penalty(Vector{1.0}, HyperParams::from_eta(1.0, 1e-8, {1.0})), std::sqrt(2.0), 1e-3);
}

TEST(PenaltyLimits, L1MonotoneInEta) {
    std::mt19937_64 rng(26);
    const std::size_t n = 30;
    const auto alpha = oracle::random_vector(n, rng, -2.0, 2.0);
    const auto scales = oracle::random_vector(n, rng, 0.2, 5.0);
    double l1 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        l1 += std::sqrt(2.0) * std::abs(alpha[j]) / std::sqrt(scales[j]);
    }
    double previous = std::numeric_limits<double>::infinity();
    for (double eta : {1e-2, 1e-4, 1e-6, 1e-8}) {
        const double gap = std::abs(plugged_penalty(alpha, HyperParams::from_eta(1.0, eta, scales)) - l1);
        EXPECT_LT(gap, previous) << "eta=" << eta;
        previous = gap;
    }
    EXPECT_LT(previous, 1e-5 * l1);
}

TEST(PenaltyLimits, LpConstantAtHalf) {
    EXPECT_NEAR(plugged_penalty(Vector{1.0}, HyperParams::from_beta(0.5, 3.0, {1.0})), 1.5, 1e-9);
}

TEST(PenaltyLimits, LpIdentityRandomised) {
    std::mt19937_64 rng(27);
    for (double r : {0.25, 0.5, 0.75}) {
        const double p_exp = 2.0 * r / (r + 1.0);
        const double c_r = (r + 1.0) / std::pow(2.0 * r, r / (r + 1.0));
        for (int trial = 0; trial < 20; ++trial) {
            const std::size_t n = 25;
            const auto alpha = oracle::random_vector(n, rng, -4.0, 4.0);
            const auto scales = oracle::random_vector(n, rng, 0.1, 10.0);
            double expected = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                expected += c_r * std::pow(std::abs(alpha[j]), p_exp) * std::pow(scales[j], -p_exp / 2.0);
            }
            const double got = plugged_penalty(alpha, HyperParams::from_beta(r, 1.5 / r, scales));
            EXPECT_LT(rel(got, expected), 1e-8) << "r=" << r;
        }
    }
}

} // namespace
