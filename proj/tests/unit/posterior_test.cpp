#include <cmath>

#include <gtest/gtest.h>

#include <dpp/errors.hpp>
#include <dpp/posterior.hpp>

#include "support/oracles.hpp"

namespace {

using namespace dpp;

const BetaParams kVague{0.001, 0.001};
const HistoricalControl kHist{60, 200, 50};

TEST(TrialOutcome, Validates) {
    EXPECT_THROW(TrialOutcome(5, 4, 0, 4), DomainError);
    EXPECT_THROW(TrialOutcome(0, 0, 0, 4), DomainError);
    EXPECT_THROW(TrialOutcome(0, 4, -1, 4), DomainError);
    EXPECT_NO_THROW(TrialOutcome(0, 1, 1, 1));
}

TEST(HybridPosterior, Examples) {
    const TrialOutcome o(12, 40, 0, 40);
    EXPECT_EQ(hybrid_posterior(o, kHist, kVague, 0.0), BetaParams(12.001, 28.001));
    const BetaParams p = hybrid_posterior(o, kHist, kVague, 0.2);
    EXPECT_NEAR(p.alpha(), 24.001, 1e-12);
    EXPECT_NEAR(p.beta(), 56.001, 1e-12);
    EXPECT_EQ(hybrid_posterior({0, 10, 0, 10}, {5, 10, 10}, {1, 1}, 1.0), BetaParams(6, 16));
    EXPECT_THROW(hybrid_posterior(o, kHist, kVague, 1.5), DomainError);
}

TEST(HybridPosterior, MeanMovesTowardHistoryWithWeight) {
    const TrialOutcome o(20, 40, 0, 40);
    double prev = hybrid_posterior(o, kHist, kVague, 0.0).mean();
    for (int i = 1; i <= 20; ++i) {
        const double m = hybrid_posterior(o, kHist, kVague, i / 20.0).mean();
        EXPECT_LT(m, prev);
        EXPECT_GT(m, kHist.rate());
        prev = m;
    }
}

TEST(TreatmentPosterior, Conjugate) {
    EXPECT_EQ(treatment_posterior({3, 10, 7, 12}, {0.5, 0.5}), BetaParams(7.5, 5.5));
}

TEST(PosteriorMeans, Examples) {
    const TrialOutcome o(12, 40, 0, 40);
    EXPECT_DOUBLE_EQ(posterior_mean_hybrid(o, kHist, kVague, 0.0), 12.001 / 40.002);
    EXPECT_DOUBLE_EQ(posterior_mean_hybrid(o, kHist, kVague, 1.0), 72.001 / 240.002);
    EXPECT_DOUBLE_EQ(posterior_mean_concurrent(o, kVague), 12.001 / 40.002);
    const BetaParams tiny(1e-9, 1e-9);
    for (double a : {0.1, 0.5, 0.9}) EXPECT_NEAR(posterior_mean_hybrid(o, kHist, tiny, a), 0.3, 1e-9);
}

TEST(Pmd, Examples) {
    const TrialOutcome o(12, 40, 0, 40);
    EXPECT_EQ(pmd(o, kHist, kVague, 0.0), 0.0);
    EXPECT_NEAR(pmd(o, kHist, kVague, 0.2), 24.001 / 80.002 - 12.001 / 40.002, 1e-15);
}

TEST(Pmd, SignFollowsRateGap) {
    const HistoricalControl h(54, 180, 45);
    for (int y = 0; y <= 45; ++y) {
        const double d = pmd({y, 45, 0, 45}, h, {1e-9, 1e-9}, 0.25);
        const double gap = h.rate() - y / 45.0;
        if (std::abs(gap) < 1e-12)
            EXPECT_NEAR(d, 0.0, 1e-12);
        else
            EXPECT_EQ(std::signbit(d), std::signbit(gap)) << y;
    }
}

TEST(RealizedWeight, ZeroBehindClosedGateOrWithoutGlobalWeight) {
    const HistoricalControl h(54, 180, 45);
    const auto policy = BorrowingPolicy::for_history(EmpiricalBayes{}, 0.1, h);
    for (int y = 0; y <= 45; ++y) {
        const auto w = realized_weight(y, 45, h, kVague, policy);
        if (!w.gate) {
            EXPECT_EQ(w.overall, 0.0);
            EXPECT_EQ(pmd({y, 45, 0, 45}, h, kVague, w.overall), 0.0);
        }
    }
    const HistoricalControl none(54, 180, 0);
    const auto p0 = BorrowingPolicy::for_history(FixedWeight{}, kNoGate, none);
    for (int y = 0; y <= 45; ++y) {
        const auto w = realized_weight(y, 45, none, kVague, p0);
        EXPECT_EQ(pmd({y, 45, 0, 45}, none, kVague, w.overall), 0.0);
    }
}

TEST(RealizedWeight, ChainOrderDoesNotMatter) {
    const HistoricalControl h(54, 180, 45);
    const auto policy = BorrowingPolicy::for_history(BayesianP{1}, 0.1, h);
    for (int y = 0; y <= 45; ++y) {
        const double p_c = y / 45.0;
        const double gated_first =
            gate_open(p_c, h.rate(), 0.1) ? policy.global_a() * dynamic_weight(y, 45, h, kVague, policy) : 0.0;
        const double dynamic_first = overall_weight(dynamic_weight(y, 45, h, kVague, policy), policy, p_c, h.rate());
        EXPECT_EQ(realized_weight(y, 45, h, kVague, policy).overall, dynamic_first);
        EXPECT_DOUBLE_EQ(gated_first, dynamic_first);
    }
}

TEST(Decide, Examples) {
    const HistoricalControl h(54, 180, 45);
    const auto policy = BorrowingPolicy::for_history(EmpiricalBayes{}, 0.1, h);
    const auto extreme = decide({0, 30, 30, 30}, h, kVague, kVague, policy, 0.99);
    EXPECT_TRUE(extreme.significant);
    EXPECT_GT(extreme.post_prob, 0.999);

    const HistoricalControl none(54, 180, 0);
    const auto p0 = BorrowingPolicy::for_history(EmpiricalBayes{}, 0.1, none);
    const auto tie = decide({9, 30, 9, 30}, none, {1, 1}, {1, 1}, p0, 0.5);
    EXPECT_NEAR(tie.post_prob, 0.5, 1e-9);
    EXPECT_THROW(decide({9, 30, 9, 30}, none, kVague, kVague, p0, 1.0), DomainError);
    EXPECT_THROW(decide({9, 30, 9, 30}, none, kVague, kVague, p0, 0.0), DomainError);
}

TEST(Decide, StrictThreshold) {
    const HistoricalControl none(54, 180, 0);
    const auto p0 = BorrowingPolicy::for_history(EmpiricalBayes{}, 0.1, none);
    const double prob = decide({9, 30, 14, 30}, none, kVague, kVague, p0, 0.5).post_prob;
    EXPECT_FALSE(decide({9, 30, 14, 30}, none, kVague, kVague, p0, prob).significant);
    EXPECT_TRUE(decide({9, 30, 14, 30}, none, kVague, kVague, p0, std::nextafter(prob, 0.0)).significant);
}

TEST(Decide, PipelineMatchesGridIntegral) {
    const HistoricalControl h(60, 200, 50);
    const auto policy = BorrowingPolicy::for_history(EmpiricalBayes{}, 0.1, h);
    const TrialOutcome o(12, 40, 20, 40);
    const auto d = decide(o, h, kVague, kVague, policy, 0.9);
    const double w = 0.25 * weight_eb(12, 40, h, kVague);
    EXPECT_DOUBLE_EQ(d.weight_used, w);
    const double grid = oracle::superiority_grid(20.001, 20.001, 12.001 + w * 60, 28.001 + w * 140);
    EXPECT_NEAR(d.post_prob, grid, 1e-5);
}

TEST(Decide, NondecreasingInTreatmentResponders) {
    const HistoricalControl h(54, 180, 45);
    const auto policy = BorrowingPolicy::for_history(EmpiricalBayes{}, 0.1, h);
    double prev = 0;
    for (int y_t = 0; y_t <= 45; ++y_t) {
        const double p = decide({14, 45, y_t, 45}, h, kVague, kVague, policy, 0.9).post_prob;
        EXPECT_GE(p, prev - 1e-12);
        prev = p;
    }
}

}  // namespace
