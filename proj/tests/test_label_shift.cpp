#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "edgema/edgema.hpp"
#include "support/label_noise.hpp"
#include "support/oracles.hpp"

using namespace edgema;

namespace {

using testkit::draw_noisy;

double weight_error(std::uint64_t seed, std::size_t n) {
    const std::vector<double> source = {0.2, 0.4, 0.4};
    const std::vector<double> ratio = {2.0, 0.5, 1.0};
    std::vector<double> target(3);
    for (int i = 0; i < 3; ++i) target[std::size_t(i)] = source[std::size_t(i)] * ratio[std::size_t(i)];
    std::mt19937_64 rng(seed);
    const auto hold = draw_noisy(rng, source, 0.9, n);
    const auto batch = draw_noisy(rng, target, 0.9, n);
    const auto c = estimate_confusion(hold.preds, hold.truths, 3);
    const auto q = estimate_predicted_distribution(batch.preds, 3);
    const auto w = compute_importance_weights(c, q);
    double err = 0;
    for (int i = 0; i < 3; ++i) err = std::max(err, std::abs(w[std::size_t(i)] - ratio[std::size_t(i)]));
    return err;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v.size() % 2 ? v[v.size() / 2] : (v[v.size() / 2 - 1] + v[v.size() / 2]) / 2;
}

LabelDistribution random_simplex(std::mt19937_64& rng, std::size_t k) {
    std::gamma_distribution<double> g(0.7, 1.0);
    std::vector<double> v(k);
    for (auto& x : v) x = g(rng) + 1e-300;
    return LabelDistribution::from_counts(v);
}

}  // namespace

TEST(Distribution, RejectsInvalidMass) {
    EXPECT_THROW(LabelDistribution({0.5, 0.6}), InvalidArgument);
    EXPECT_THROW(LabelDistribution({-0.1, 1.1}), InvalidArgument);
    EXPECT_THROW(LabelDistribution(std::vector<double>{}), InvalidArgument);
    EXPECT_NO_THROW(LabelDistribution({0.5, 0.5 + 1e-10}));
}

TEST(PredictedDistribution, Examples) {
    EXPECT_EQ(estimate_predicted_distribution(std::vector<int>{0, 0, 1, 2}, 3).probs(),
              (std::vector<double>{0.5, 0.25, 0.25}));
    EXPECT_EQ(estimate_predicted_distribution(std::vector<int>{1, 1, 1}, 3).probs(), (std::vector<double>{0, 1, 0}));
    EXPECT_EQ(estimate_predicted_distribution(std::vector<int>{2}, 4).probs(), (std::vector<double>{0, 0, 1, 0}));
    EXPECT_THROW(estimate_predicted_distribution(std::vector<int>{}, 3), InvalidArgument);
    EXPECT_THROW(estimate_predicted_distribution(std::vector<int>{3}, 3), InvalidArgument);
}

TEST(PredictedDistribution, AlwaysOnSimplex) {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 200; ++t) {
        const std::size_t k = 2 + std::size_t(t % 6);
        std::uniform_int_distribution<int> pick(0, int(k) - 1);
        std::vector<int> preds(1 + std::size_t(t) * 3);
        for (auto& p : preds) p = pick(rng);
        const auto q = estimate_predicted_distribution(preds, k);
        double s = 0;
        for (double v : q.probs()) {
            EXPECT_GE(v, 0.0);
            s += v;
        }
        EXPECT_NEAR(s, 1.0, 1e-9);
    }
}

TEST(Confusion, PerfectAndConstantModels) {
    const std::vector<int> truth = {0, 1, 0, 1};
    const auto c = estimate_confusion(truth, truth, 2);
    EXPECT_EQ(c.joint, (std::vector<double>{0.5, 0, 0, 0.5}));

    const std::vector<int> t3 = {0, 1, 1, 2, 2, 2};
    const auto z = estimate_confusion(std::vector<int>(6, 0), t3, 3);
    EXPECT_DOUBLE_EQ(z(0, 0), 1.0 / 6);
    EXPECT_DOUBLE_EQ(z(0, 1), 2.0 / 6);
    EXPECT_DOUBLE_EQ(z(0, 2), 3.0 / 6);
    EXPECT_EQ(z.row_sums()[1], 0.0);
    const auto cols = z.column_sums();
    EXPECT_DOUBLE_EQ(cols[2], 0.5);
}

TEST(Confusion, NinetyPercentNoiseModel) {
    std::mt19937_64 rng(2);
    const auto d = draw_noisy(rng, {0.5, 0.5}, 0.9, 10000);
    const auto c = estimate_confusion(d.preds, d.truths, 2);
    EXPECT_NEAR(c(0, 0), 0.45, 0.02);
    EXPECT_NEAR(c(1, 1), 0.45, 0.02);
    EXPECT_NEAR(c(0, 1), 0.05, 0.02);
    EXPECT_NEAR(c(1, 0), 0.05, 0.02);
    double s = 0;
    for (double v : c.joint) s += v;
    EXPECT_NEAR(s, 1.0, 1e-9);
}

TEST(Confusion, MissingClassIsAnError) {
    EXPECT_THROW(estimate_confusion(std::vector<int>{0, 1}, std::vector<int>{0, 0}, 2), InvalidArgument);
    EXPECT_THROW(estimate_confusion(std::vector<int>{}, std::vector<int>{}, 2), InvalidArgument);
}

TEST(Weights, PerfectClassifierTwoClasses) {
    const ConfusionMatrix c{2, {0.5, 0, 0, 0.5}};
    const auto w = compute_importance_weights(c, LabelDistribution({0.8, 0.2}));
    // hand solve: 0.5 w0 = 0.8, 0.5 w1 = 0.2
    EXPECT_NEAR(w[0], 1.6, 1e-4);
    EXPECT_NEAR(w[1], 0.4, 1e-4);
}

TEST(Weights, NoShiftGivesOnes) {
    std::mt19937_64 rng(3);
    const auto d = draw_noisy(rng, {0.2, 0.5, 0.3}, 0.8, 3000);
    const auto c = estimate_confusion(d.preds, d.truths, 3);
    const auto w = compute_importance_weights(c, LabelDistribution(c.row_sums()));
    for (double v : w.w) EXPECT_NEAR(v, 1.0, 1e-4);
}

TEST(Weights, DiagonalConfusionReproducesRatios) {
    const std::vector<double> prior = {0.1, 0.2, 0.3, 0.4};
    ConfusionMatrix c{4, std::vector<double>(16, 0.0)};
    for (std::size_t i = 0; i < 4; ++i) c.joint[i * 4 + i] = prior[i];
    const LabelDistribution q({0.4, 0.3, 0.2, 0.1});
    const auto w = compute_importance_weights(c, q);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(w[i], q[i] / prior[i], 1e-3 * q[i] / prior[i]);
}

TEST(Weights, ClippedToRange) {
    const ConfusionMatrix c{2, {0.05, 0, 0, 0.95}};
    const auto w = compute_importance_weights(c, LabelDistribution({0.9, 0.1}));
    EXPECT_EQ(w[0], 10.0);
    EXPECT_GE(w[1], 0.0);

    // anti-correlated classifier: solution has a negative component
    const ConfusionMatrix anti{2, {0.1, 0.4, 0.4, 0.1}};
    const auto v = compute_importance_weights(anti, LabelDistribution({0.05, 0.95}));
    EXPECT_EQ(v[1], 0.0);
}

TEST(Weights, ThreeClassRecovery) {
    std::vector<double> errors;
    for (std::uint64_t s = 0; s < 20; ++s) errors.push_back(weight_error(4 + s, 5000));
    EXPECT_LE(median(errors), 0.15);
    EXPECT_LE(*std::max_element(errors.begin(), errors.end()), 0.4);
}

TEST(Weights, ErrorShrinksWithSampleSize) {
    std::vector<double> small, large;
    for (std::uint64_t s = 0; s < 20; ++s) {
        small.push_back(weight_error(100 + s, 500));
        large.push_back(weight_error(100 + s, 5000));
    }
    EXPECT_LT(median(large), median(small));
}

TEST(Weights, RankDeficientMatrixIsReported) {
    const ConfusionMatrix c{2, {0.25, 0.25, 0.25, 0.25}};
    try {
        compute_importance_weights(c, LabelDistribution({0.5, 0.5}));
        FAIL() << "expected RankDeficientError";
    } catch (const RankDeficientError& e) {
        EXPECT_GT(e.condition(), 1e8);
    }
    EXPECT_THROW(compute_importance_weights(c, LabelDistribution({0.2, 0.3, 0.5})), InvalidArgument);
}

TEST(Kl, Examples) {
    const LabelDistribution p({0.5, 0.5}), m({0.25, 0.75});
    EXPECT_EQ(kl_divergence(p, p), 0.0);
    EXPECT_NEAR(kl_divergence(p, m), 0.14384, 1e-4);
    EXPECT_NEAR(kl_divergence(p, m), oracle::kl_direct(p.probs(), m.probs()), 1e-5);
    const double huge = kl_divergence(LabelDistribution({1, 0}), LabelDistribution({0, 1}));
    EXPECT_TRUE(std::isfinite(huge));
    EXPECT_GT(huge, 10.0);
}

TEST(Kl, Asymmetric) {
    const LabelDistribution p({0.5, 0.5}), m({0.25, 0.75});
    // direct summation: 0.25 ln(0.5) + 0.75 ln(1.5)
    const double reverse = oracle::kl_direct(m.probs(), p.probs());
    EXPECT_NEAR(reverse, 0.13081, 1e-4);
    EXPECT_NEAR(kl_divergence(m, p), reverse, 1e-5);
    EXPECT_GT(std::abs(kl_divergence(p, m) - kl_divergence(m, p)), 1e-3);
}

TEST(Kl, GibbsInequality) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 1000; ++t) {
        const std::size_t k = 2 + std::size_t(t % 9);
        const auto p = random_simplex(rng, k), m = random_simplex(rng, k);
        EXPECT_GE(kl_divergence(p, m), 0.0);
        EXPECT_EQ(kl_divergence(p, p), 0.0);
    }
}

TEST(Kl, TwoClassDriftAgainstDefaultThreshold) {
    // 0.64 ln 1.28 + 0.36 ln 0.72: a mild drift that stays under the 0.1-nat default
    const double d = kl_divergence(LabelDistribution({0.64, 0.36}), LabelDistribution::uniform(2));
    EXPECT_NEAR(d, oracle::kl_direct({0.64, 0.36}, {0.5, 0.5}), 1e-5);
    EXPECT_NEAR(d, 0.039729, 1e-5);
    EXPECT_EQ(shift_gate(d, EngineConfig{}.kl_threshold), GateDecision::Lag);
}

TEST(Gate, Boundary) {
    EXPECT_EQ(shift_gate(0.0, 0.1), GateDecision::Lag);
    EXPECT_EQ(shift_gate(0.1, 0.1), GateDecision::Adapt);
    EXPECT_EQ(shift_gate(0.5, 0.1), GateDecision::Adapt);
    EXPECT_EQ(shift_gate(0.0, 0.0), GateDecision::Adapt);
    EXPECT_EQ(shift_gate(1e300, std::numeric_limits<double>::infinity()), GateDecision::Lag);
}
