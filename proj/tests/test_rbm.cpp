#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "sentry/rbm.hpp"

using namespace sentry;
using namespace sentry::rbm;
using kdd::AttackClass;

namespace {

RbmLayer random_layer(std::size_t x, std::size_t y, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    RbmLayer l(x, y);
    for (Eigen::Index i = 0; i < l.weights.size(); ++i) l.weights.data()[i] = g(rng);
    for (Eigen::Index i = 0; i < l.visible_bias.size(); ++i) l.visible_bias[i] = g(rng);
    for (Eigen::Index i = 0; i < l.hidden_bias.size(); ++i) l.hidden_bias[i] = g(rng);
    return l;
}

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Plain batch gradient-descent logistic regression on raw inputs.
double raw_logistic_accuracy(const kdd::Dataset& d) {
    const auto k = d.dim();
    std::vector<double> w(k + 1, 0.0);
    for (int it = 0; it < 3000; ++it) {
        std::vector<double> g(k + 1, 0.0);
        for (std::size_t i = 0; i < d.size(); ++i) {
            double z = w[k];
            for (std::size_t j = 0; j < k; ++j) z += w[j] * d.x[i][j];
            const double err = (d.truth(i) == Verdict::Intrusive ? 1.0 : 0.0) - logistic(z);
            for (std::size_t j = 0; j < k; ++j) g[j] += err * d.x[i][j];
            g[k] += err;
        }
        for (std::size_t j = 0; j <= k; ++j) w[j] += 0.5 * g[j] / static_cast<double>(d.size());
    }
    std::size_t right = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        double z = w[k];
        for (std::size_t j = 0; j < k; ++j) z += w[j] * d.x[i][j];
        right += (z >= 0.0) == (d.truth(i) == Verdict::Intrusive);
    }
    return static_cast<double>(right) / static_cast<double>(d.size());
}

kdd::Dataset toy_separable(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    kdd::Dataset d;
    for (std::size_t i = 0; i < n; ++i) {
        FeatureVector v(6);
        for (auto& x : v) x = u(rng);
        const bool attack = v[0] + v[1] > 1.0 + 0.1 * (v[2] - 0.5);
        if (std::abs(v[0] + v[1] - 1.0) < 0.1) continue;
        d.push_back(std::move(v), attack ? AttackClass::DoS : AttackClass::Normal);
    }
    return d;
}

} // namespace

TEST(Energy, Examples) {
    RbmLayer zero(3, 2);
    EXPECT_EQ(energy(zero, unpack_bits(5, 3), unpack_bits(3, 2)), 0.0);

    RbmLayer one(1, 1);
    one.weights(0, 0) = 2.0;
    EXPECT_EQ(energy(one, unpack_bits(1, 1), unpack_bits(1, 1)), -2.0);

    RbmLayer wrong(2, 2);
    EXPECT_THROW(energy(wrong, unpack_bits(1, 3), unpack_bits(1, 2)), DimensionMismatchError);
}

TEST(Energy, ExactlyLinearInEachParameter) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        auto l = random_layer(4, 3, rng);
        // Round parameters to multiples of 1/8 so every sum is exact.
        l.weights = (l.weights * 8.0).array().round() / 8.0;
        l.visible_bias = (l.visible_bias * 8.0).array().round() / 8.0;
        l.hidden_bias = (l.hidden_bias * 8.0).array().round() / 8.0;
        const auto v = unpack_bits(rng() % 16, 4), h = unpack_bits(rng() % 8, 3);
        const double e = energy(l, v, h);
        const auto x = static_cast<Eigen::Index>(rng() % 4), y = static_cast<Eigen::Index>(rng() % 3);
        auto a = l;
        a.visible_bias[x] += 1.0;
        EXPECT_EQ(energy(a, v, h), e - v[x]);
        auto b = l;
        b.hidden_bias[y] += 1.0;
        EXPECT_EQ(energy(b, v, h), e - h[y]);
        auto w = l;
        w.weights(x, y) += 1.0;
        EXPECT_EQ(energy(w, v, h), e - v[x] * h[y]);
    }
}

TEST(Exhaustive, ZeroParametersAreUniform) {
    const auto d = exhaustive_distribution(RbmLayer(2, 1));
    ASSERT_EQ(d.joint.size(), 8u);
    for (double p : d.joint) EXPECT_DOUBLE_EQ(p, 0.125);
}

TEST(Exhaustive, NormalizedAndMarginalsConsistent) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t x = 1 + rng() % 7, y = 1 + rng() % (12 - x);
        const auto d = exhaustive_distribution(random_layer(x, y, rng));
        double total = 0.0;
        for (double p : d.joint) total += p;
        EXPECT_NEAR(total, 1.0, 1e-9);
        for (std::uint64_t v = 0; v < (1ULL << x); ++v) {
            double m = 0.0;
            for (std::uint64_t h = 0; h < (1ULL << y); ++h) m += d(v, h);
            EXPECT_NEAR(d.p_visible[v], m, 1e-12);
        }
        for (std::uint64_t h = 0; h < (1ULL << y); ++h) {
            double m = 0.0;
            for (std::uint64_t v = 0; v < (1ULL << x); ++v) m += d(v, h);
            EXPECT_NEAR(d.p_hidden[h], m, 1e-12);
        }
    }
}

TEST(Exhaustive, TooLarge) {
    EXPECT_THROW(exhaustive_distribution(RbmLayer(12, 9)), TooLargeError);
}

TEST(Conditionals, ZeroParametersGiveOneHalf) {
    RbmLayer l(3, 4);
    const auto h = cond_h_given_v(l, unpack_bits(6, 3));
    for (Eigen::Index i = 0; i < h.size(); ++i) EXPECT_EQ(h[i], 0.5);
    const auto v = cond_v_given_h(l, unpack_bits(9, 4));
    for (Eigen::Index i = 0; i < v.size(); ++i) EXPECT_EQ(v[i], 0.5);
}

TEST(Conditionals, MatchJointDerivedConditionals) {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t x = 1 + rng() % 6, y = 1 + rng() % 6;
        const auto l = random_layer(x, y, rng);
        const auto d = exhaustive_distribution(l);
        for (std::uint64_t v = 0; v < (1ULL << x); ++v) {
            const auto p = cond_h_given_v(l, unpack_bits(v, x));
            for (std::size_t u = 0; u < y; ++u) {
                double on = 0.0;
                for (std::uint64_t h = 0; h < (1ULL << y); ++h)
                    if (h >> u & 1) on += d(v, h);
                EXPECT_NEAR(p[static_cast<Eigen::Index>(u)], on / d.p_visible[v], 1e-9);
            }
        }
        for (std::uint64_t h = 0; h < (1ULL << y); ++h) {
            const auto p = cond_v_given_h(l, unpack_bits(h, y));
            for (std::size_t u = 0; u < x; ++u) {
                double on = 0.0;
                for (std::uint64_t v = 0; v < (1ULL << x); ++v)
                    if (v >> u & 1) on += d(v, h);
                EXPECT_NEAR(p[static_cast<Eigen::Index>(u)], on / d.p_hidden[h], 1e-9);
            }
        }
    }
}

TEST(Conditionals, Saturation) {
    RbmLayer l(3, 2);
    l.hidden_bias.setConstant(20.0);
    const auto p = cond_h_given_v(l, unpack_bits(5, 3));
    for (Eigen::Index i = 0; i < p.size(); ++i) EXPECT_GE(p[i], 1.0 - 1e-8);
    EXPECT_THROW(cond_h_given_v(l, unpack_bits(1, 2)), DimensionMismatchError);
    EXPECT_THROW(cond_v_given_h(l, unpack_bits(1, 3)), DimensionMismatchError);
}

TEST(Cd1, ZeroLearningRateLeavesParametersUnchanged) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<FeatureVector> data(100, FeatureVector(5));
    for (auto& r : data)
        for (auto& v : r) v = u(rng);
    CdParams p{3, 0, 0.0, 16, 4};
    const auto before = cd1_train_layer(data, p);
    p.epochs = 7;
    const auto after = cd1_train_layer(data, p);
    EXPECT_EQ(before.weights, after.weights);
    EXPECT_EQ(before.visible_bias, after.visible_bias);
    EXPECT_EQ(before.hidden_bias, after.hidden_bias);
}

TEST(Cd1, DeterministicAndLogsEveryEpoch) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<FeatureVector> data(150, FeatureVector(6));
    for (auto& r : data)
        for (auto& v : r) v = u(rng);
    const CdParams p{4, 5, 0.1, 32, 11};
    std::vector<double> log_a, log_b;
    const auto a = cd1_train_layer(data, p, &log_a);
    const auto b = cd1_train_layer(data, p, &log_b);
    EXPECT_EQ(a.weights, b.weights);
    EXPECT_EQ(a.hidden_bias, b.hidden_bias);
    EXPECT_EQ(log_a, log_b);
    EXPECT_EQ(log_a.size(), 5u);
    EXPECT_TRUE(a.finite());
}

TEST(Cd1, TwoPatternProbabilityRises) {
    std::vector<FeatureVector> data;
    for (int i = 0; i < 200; ++i) data.push_back(i % 2 ? FeatureVector{1, 1, 0, 0} : FeatureVector{0, 0, 1, 1});
    CdParams p{2, 0, 0.1, 10, 3};
    const auto init = exhaustive_distribution(cd1_train_layer(data, p));
    p.epochs = 200;
    const auto trained = exhaustive_distribution(cd1_train_layer(data, p));
    const std::uint64_t a = 0b0011, b = 0b1100;
    EXPECT_GT(trained.p_visible[a] + trained.p_visible[b], init.p_visible[a] + init.p_visible[b]);
    EXPECT_GT(trained.p_visible[a] + trained.p_visible[b], 0.5);
}

TEST(Cd1, EmptyData) {
    EXPECT_THROW(cd1_train_layer(std::span<const FeatureVector>{}, CdParams{}), EmptyTrainingSetError);
}

TEST(Stack, SeparableToySetWithLogisticOracle) {
    const auto d = toy_separable(600, 4);
    ASSERT_GE(raw_logistic_accuracy(d), 0.95);
    StackParams p;
    p.hidden = {6};
    p.epochs = 30;
    p.batch = 16;
    const auto s = train_stack(d, p);
    std::size_t right = 0;
    for (std::size_t i = 0; i < d.size(); ++i) right += classify(s, d.x[i]).verdict() == d.truth(i);
    EXPECT_GE(static_cast<double>(right) / static_cast<double>(d.size()), 0.95);
}

TEST(Stack, ThreeLayerShape) {
    const auto d = toy_separable(200, 5);
    StackParams p;
    p.epochs = 2;
    const auto s = train_stack(d, p);
    ASSERT_EQ(s.layers.size(), 3u);
    EXPECT_EQ(s.layers[0].visible(), 6u);
    EXPECT_EQ(s.layers[0].hidden(), 24u);
    EXPECT_EQ(s.layers[1].hidden(), 16u);
    EXPECT_EQ(s.layers[2].hidden(), 8u);
    EXPECT_NO_THROW(s.validate());
}

TEST(Stack, ZeroEpochsStillFitsHead) {
    const auto d = toy_separable(200, 6);
    StackParams p;
    p.epochs = 0;
    const auto s = train_stack(d, p);
    const auto c = classify(s, d.x[0]);
    EXPECT_NEAR(c.intrusive + c.normal, 1.0, 1e-12);
}

TEST(Stack, Deterministic) {
    const auto d = toy_separable(300, 7);
    StackParams p;
    p.epochs = 3;
    EXPECT_EQ(to_json(train_stack(d, p)).dump(), to_json(train_stack(d, p)).dump());
}

TEST(Classify, ZeroHeadIsSymmetric) {
    std::mt19937_64 rng(12);
    RbmStack s;
    s.layers.push_back(random_layer(4, 3, rng));
    s.head.weights = Matrix::Zero(3, 2);
    const std::vector<double> x = {0.1, 0.9, 0.4, 0.2};
    const auto c = classify(s, x);
    EXPECT_EQ(c.intrusive, 0.5);
    EXPECT_EQ(c.normal, 0.5);
    EXPECT_EQ(c.verdict(), Verdict::Intrusive);
}

TEST(Classify, OutputsSumToOneAndAreMonotone) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        RbmStack s;
        s.layers.push_back(random_layer(5, 4, rng, 2.0));
        s.layers.push_back(random_layer(4, 3, rng, 2.0));
        s.head.weights = Matrix::Random(3, 2) * 3.0;
        s.head.bias = Eigen::Vector2d::Random();
        std::vector<double> x(5);
        for (auto& v : x) v = u(rng);
        const auto c = classify(s, x);
        EXPECT_NEAR(c.intrusive + c.normal, 1.0, 1e-12);
        auto t = s;
        t.head.weights(static_cast<Eigen::Index>(rng() % 3), 0) += u(rng);
        EXPECT_GE(classify(t, x).intrusive, c.intrusive);
    }
    RbmStack s;
    s.layers.push_back(RbmLayer(2, 2));
    s.head.weights = Matrix::Zero(2, 2);
    const std::vector<double> narrow = {0.5};
    EXPECT_THROW(classify(s, narrow), DimensionMismatchError);
}

TEST(StackJson, RoundTripAndValidation) {
    const auto d = toy_separable(200, 8);
    StackParams p;
    p.hidden = {5, 3};
    p.epochs = 2;
    const auto s = train_stack(d, p);
    const auto r = stack_from_json(nlohmann::json::parse(to_json(s).dump()));
    for (const auto& x : d.x) EXPECT_EQ(classify(r, x).intrusive, classify(s, x).intrusive);

    auto j = to_json(s);
    j["layers"][1]["visible"] = 4;
    EXPECT_THROW(stack_from_json(j), std::exception);
}
