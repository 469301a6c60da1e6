#include <gtest/gtest.h>

#include <random>
#include <sstream>
#include <vector>

#include "sentry/rl.hpp"

using namespace sentry;
using namespace sentry::rl;
using kdd::AttackClass;

namespace {

Discretizer unit_bins(std::size_t k, std::size_t bins) {
    std::vector<std::size_t> f(k);
    std::iota(f.begin(), f.end(), std::size_t{0});
    return Discretizer(f, std::vector<double>(k, 0.0), std::vector<double>(k, 1.0), bins);
}

} // namespace

TEST(Discretize, Examples) {
    const auto d = unit_bins(1, 3);
    const std::vector<double> zero = {0.0}, high = {0.99}, mid = {0.5}, top = {1.0}, below = {-3.0};
    EXPECT_EQ(discretize(zero, d), 0u);
    EXPECT_EQ(discretize(high, d), 2u);
    EXPECT_EQ(discretize(mid, d), 1u);
    EXPECT_EQ(discretize(top, d), 2u);
    EXPECT_EQ(discretize(below, d), 0u);
    EXPECT_THROW(discretize(zero, Discretizer{}), UnfittedSpecError);
}

TEST(Discretize, MixedRadixBoundAndDeterminism) {
    const auto d = unit_bins(4, 3);
    EXPECT_EQ(d.state_count(), 81u);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-0.2, 1.2);
    for (int i = 0; i < 2000; ++i) {
        std::vector<double> v(4);
        for (auto& x : v) x = u(rng);
        const auto id = d(v);
        EXPECT_LT(id, 81u);
        EXPECT_EQ(id, d(std::vector<double>(v)));
        std::size_t expect = 0, radix = 1;
        for (std::size_t k = 0; k < 4; ++k, radix *= 3) expect += d.bin(k, v[k]) * radix;
        EXPECT_EQ(id, expect);
    }
}

TEST(Discretize, FitPicksHighestVarianceFeatures) {
    std::vector<FeatureVector> data;
    for (int i = 0; i < 100; ++i) data.push_back({0.5, (i % 10) / 10.0, 0.5 + (i % 2) * 0.01, (i % 2) * 1.0});
    const auto d = Discretizer::fit(data, 2, 3);
    EXPECT_EQ(d.features(), (std::vector<std::size_t>{3, 1}));
    EXPECT_EQ(d.lo()[0], 0.0);
    EXPECT_EQ(d.hi()[0], 1.0);
    const auto r = discretizer_from_json(nlohmann::json::parse(to_json(d).dump()));
    for (const auto& v : data) EXPECT_EQ(r(v), d(v));
}

TEST(QUpdate, Examples) {
    QTable q(2, 2);
    q_update(q, 0, 1, 3.5, 1, {1.0, 0.0});
    EXPECT_EQ(q(0, 1), 3.5);

    QTable z(2, 2);
    q_update(z, 0, 0, 1.0, 1, {0.5, 0.9});
    EXPECT_EQ(z(0, 0), 0.5);
}

TEST(QUpdate, SelfLoopConvergesToGeometricSum) {
    QTable q(1, 1);
    for (int i = 0; i < 2000; ++i) q_update(q, 0, 0, 2.0, 0, {0.3, 0.8});
    EXPECT_NEAR(q(0, 0), 2.0 / (1.0 - 0.8), 1e-6);
}

TEST(QUpdate, TouchesOnlyTheUpdatedEntry) {
    std::mt19937_64 rng(2);
    QTable q(6, 3);
    for (StateId s = 0; s < 6; ++s)
        for (ActionId a = 0; a < 3; ++a) q.set(s, a, static_cast<double>(rng() % 100) / 10.0);
    for (int i = 0; i < 200; ++i) {
        const auto before = q;
        const StateId s = rng() % 6, next = rng() % 6;
        const ActionId a = rng() % 3;
        if (i % 2) q_update(q, s, a, 1.0, next, {0.4, 0.9});
        else sarsa_update(q, s, a, 1.0, next, rng() % 3, {0.4, 0.9});
        for (StateId t = 0; t < 6; ++t)
            for (ActionId b = 0; b < 3; ++b)
                if (t != s || b != a) {
                    EXPECT_EQ(q(t, b), before(t, b));
                }
    }
}

TEST(QTable, UnseenEntriesReadAsDefault) {
    const QTable q(4, 2, 0.0);
    EXPECT_EQ(q(3, 1), 0.0);
    EXPECT_FALSE(q.seen(3, 1));
    EXPECT_THROW(q(4, 0), std::out_of_range);
}

TEST(SarsaUpdate, Examples) {
    QTable q(2, 2);
    sarsa_update(q, 0, 0, -2.0, 1, 1, {1.0, 0.0});
    EXPECT_EQ(q(0, 0), -2.0);
    QTable z(2, 2);
    sarsa_update(z, 0, 0, 1.0, 1, 0, {0.5, 0.9});
    EXPECT_EQ(z(0, 0), 0.5);
}

TEST(SarsaUpdate, GreedyNextActionIsBitIdenticalToQStep) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int i = 0; i < 5000; ++i) {
        QTable q(5, 3);
        for (StateId s = 0; s < 5; ++s)
            for (ActionId a = 0; a < 3; ++a) q.set(s, a, u(rng));
        auto sarsa = q;
        const StateId s = rng() % 5, next = rng() % 5;
        const ActionId a = rng() % 3;
        const double r = u(rng);
        const Step st{std::uniform_real_distribution<double>(0.01, 1.0)(rng), std::uniform_real_distribution<double>(0.0, 0.99)(rng)};
        q_update(q, s, a, r, next, st);
        sarsa_update(sarsa, s, a, r, next, sarsa.greedy(next), st);
        EXPECT_EQ(q, sarsa);
    }
}

TEST(TdUpdate, Examples) {
    VTable v(2);
    td_update(v, 0, 4.0, 1, {1.0, 0.0});
    EXPECT_EQ(v(0), 4.0);
    VTable z(2);
    td_update(z, 0, 1.0, 1, {0.5, 1.0});
    EXPECT_EQ(z(0), 0.5);
    EXPECT_EQ(z(1), 0.0);

    VTable loop(1);
    for (int i = 0; i < 3000; ++i) td_update(loop, 0, 1.0, 0, {0.2, 0.9});
    EXPECT_NEAR(loop(0), 10.0, 1e-6);
}

namespace {

MdpSpec goal_chain(double discount) {
    // state 0 -> state 1 (reward 0); state 1 loops with reward 1. One action.
    MdpSpec m(2, 1, discount);
    m.p(0, 0, 1) = 1.0;
    m.p(1, 0, 1) = 1.0;
    m.r(1, 0, 1) = 1.0;
    return m;
}

MdpSpec random_mdp(std::size_t n, std::size_t actions, double discount, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    MdpSpec m(n, actions, discount);
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t a = 0; a < actions; ++a) {
            double sum = 0.0;
            for (std::size_t t = 0; t < n; ++t) sum += m.p(s, a, t) = u(rng);
            for (std::size_t t = 0; t < n; ++t) {
                m.p(s, a, t) /= sum;
                m.r(s, a, t) = u(rng) * 2.0 - 1.0;
            }
        }
    return m;
}

} // namespace

TEST(ValueIteration, ZeroDiscountGivesBestImmediateReward) {
    std::mt19937_64 rng(4);
    const auto m = random_mdp(4, 3, 0.0, rng);
    const auto r = value_iteration(m);
    for (std::size_t s = 0; s < 4; ++s) {
        double best = -1e9;
        for (std::size_t a = 0; a < 3; ++a) {
            double e = 0.0;
            for (std::size_t t = 0; t < 4; ++t) e += m.p(s, a, t) * m.r(s, a, t);
            best = std::max(best, e);
        }
        EXPECT_NEAR(r.values[s], best, 1e-12);
    }
}

TEST(ValueIteration, TwoStateChain) {
    const auto r = value_iteration(goal_chain(0.9));
    EXPECT_NEAR(r.values[1], 10.0, 1e-8);
    EXPECT_NEAR(r.values[0], 9.0, 1e-8);
    // Brute force: discounted return of the deterministic trajectory.
    double ret = 0.0, g = 1.0;
    for (int t = 0; t < 2000; ++t, g *= 0.9) ret += t == 0 ? 0.0 : g;
    EXPECT_NEAR(r.values[0], ret, 1e-8);
}

TEST(ValueIteration, Contraction) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const double discount = 0.5 + 0.45 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const auto r = value_iteration(random_mdp(6, 2, discount, rng), 1e-12);
        for (std::size_t k = 1; k < r.residuals.size(); ++k)
            EXPECT_LE(r.residuals[k], discount * r.residuals[k - 1] + 1e-12);
    }
}

TEST(ValueIteration, NonStochasticRows) {
    MdpSpec m(2, 1, 0.9);
    m.p(0, 0, 0) = 0.5;
    m.p(1, 0, 1) = 1.0;
    EXPECT_THROW(value_iteration(m), NonStochasticTransitionError);
}

namespace {

kdd::Dataset one_state(std::size_t n, AttackClass c) {
    kdd::Dataset d;
    for (std::size_t i = 0; i < n; ++i) d.push_back({0.2, 0.2}, c);
    return d;
}

} // namespace

TEST(TrainAgent, AlwaysIntrusiveStateLearnsAlarm) {
    const auto d = one_state(50, AttackClass::DoS);
    const auto spec = unit_bins(2, 3);
    TrafficEnvironment env(d, spec);
    AgentConfig cfg;
    cfg.episodes = 20;
    for (auto algo : {Algorithm::QLearning, Algorithm::Sarsa}) {
        const auto agent = train_agent(env, algo, cfg);
        const StateId s = spec(d.x[0]);
        EXPECT_GT(agent.q(s, kAlarm), agent.q(s, kPass));
        EXPECT_EQ(rl_classify(agent.q, s), Verdict::Intrusive);
    }
}

TEST(TrainAgent, AlwaysRandomStillTracesEveryEpisode) {
    const auto d = one_state(30, AttackClass::Normal);
    const auto spec = unit_bins(2, 3);
    TrafficEnvironment env(d, spec);
    AgentConfig cfg;
    cfg.epsilon_start = 1.0;
    cfg.epsilon_floor = 1.0;
    cfg.episodes = 12;
    const auto agent = train_agent(env, Algorithm::QLearning, cfg);
    ASSERT_EQ(agent.trace.size(), 12u);
    for (const auto& t : agent.trace) {
        EXPECT_EQ(t.epsilon, 1.0);
        EXPECT_EQ(t.steps, 30u);
        EXPECT_LE(std::abs(t.cumulative_reward), 30.0);
    }
    std::ostringstream out;
    write_trace(out, agent.trace);
    const auto text = out.str();
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 13);
}

TEST(TrainAgent, Deterministic) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    kdd::Dataset d;
    for (int i = 0; i < 300; ++i) {
        FeatureVector v = {u(rng), u(rng), u(rng)};
        const auto c = v[0] > 0.6 ? AttackClass::Probe : AttackClass::Normal;
        d.push_back(std::move(v), c);
    }
    const auto spec = Discretizer::fit(d.x, 3, 3);
    AgentConfig cfg;
    cfg.episodes = 10;
    cfg.seed = 99;
    TrafficEnvironment e1(d, spec), e2(d, spec);
    EXPECT_EQ(train_agent(e1, Algorithm::Sarsa, cfg).q, train_agent(e2, Algorithm::Sarsa, cfg).q);
}

TEST(TrainAgent, Preconditions) {
    kdd::Dataset empty;
    EXPECT_THROW(TrafficEnvironment(empty, unit_bins(1, 3)), EmptyTrainingSetError);
    const Discretizer unfitted;
    EXPECT_THROW(TrafficEnvironment(one_state(3, AttackClass::Normal), unfitted), UnfittedSpecError);
    AgentConfig bad;
    bad.alpha = 1.0;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = {};
    bad.gamma = 0.0;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(AgentConfig, EpsilonSchedule) {
    AgentConfig cfg;
    EXPECT_EQ(cfg.epsilon(0), 1.0);
    EXPECT_DOUBLE_EQ(cfg.epsilon(1), 0.995);
    EXPECT_EQ(cfg.epsilon(100000), 0.01);
}

TEST(RlClassify, Examples) {
    QTable q(3, 2);
    q.set(0, kAlarm, 1.0);
    EXPECT_EQ(rl_classify(q, 0), Verdict::Intrusive);
    EXPECT_EQ(rl_classify(q, 1), Verdict::Intrusive);
    q.set(2, kAlarm, -1.0);
    EXPECT_EQ(rl_classify(q, 2), Verdict::Normal);
    EXPECT_EQ(rl_score(q, 2), -1.0);
}

TEST(TdDetector, SeparatesPureStates) {
    kdd::Dataset d;
    for (int i = 0; i < 200; ++i) {
        const bool attack = i % 2 == 0;
        d.push_back({attack ? 0.9 : 0.1}, attack ? AttackClass::DoS : AttackClass::Normal);
    }
    const auto spec = unit_bins(1, 3);
    TrafficEnvironment env(d, spec);
    AgentConfig cfg;
    cfg.episodes = 10;
    const auto t = train_td_detector(env, cfg);
    const std::vector<double> attack = {0.9}, normal = {0.1}, unseen = {0.5};
    EXPECT_EQ(td_classify(t, spec(attack)), Verdict::Intrusive);
    EXPECT_EQ(td_classify(t, spec(normal)), Verdict::Normal);
    EXPECT_EQ(td_classify(t, spec(unseen)), Verdict::Intrusive);
    EXPECT_EQ(t.trace.size(), 10u);
}

TEST(RlJson, TablesRoundTrip) {
    QTable q(5, 2);
    q.set(3, kPass, 0.25);
    q.set(4, kAlarm, -1.5);
    const auto j = to_json(q);
    EXPECT_EQ(j["values"]["3:pass"], 0.25);
    EXPECT_EQ(qtable_from_json(nlohmann::json::parse(j.dump())), q);

    VTable v(3);
    v.set(1, 2.5);
    EXPECT_EQ(vtable_from_json(to_json(v)), v);
}
