#pragma once

// Tabular reinforcement-learning detectors.
//
// The IDS task is posed as an MDP: a state is a binned feature vector, the
// actions are {alarm, pass}, a correct action earns +1 and a wrong one -1, and
// the next state is the next record of the (shuffled) traffic stream. Q-learning
// and SARSA learn action values; the TD detector evaluates a fixed uniform
// policy with TD(0) and scores each action by its one-step lookahead.
// Value iteration over an explicit MDP serves as the reference solution.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sentry/error.hpp"
#include "sentry/kdd.hpp"
#include "sentry/types.hpp"

namespace sentry::rl {

using StateId = std::uint32_t;
using ActionId = std::uint32_t;

/// IDS actions. Alarm has the lower index so greedy ties resolve to it.
enum class IdsAction : ActionId { Alarm = 0, Pass = 1 };
inline constexpr ActionId kAlarm = 0;
inline constexpr ActionId kPass = 1;

// ---------------------------------------------------------------------------
// Discretization

/// Equal-width binning of the k highest-variance training features.
class Discretizer {
public:
    static constexpr std::size_t kMaxStates = std::size_t{1} << 22;

    Discretizer() = default;
    Discretizer(std::vector<std::size_t> features, std::vector<double> lo, std::vector<double> hi,
                std::size_t bins)
        : features_(std::move(features)), lo_(std::move(lo)), hi_(std::move(hi)), bins_(bins) {
        check();
    }

    static Discretizer fit(std::span<const FeatureVector> data, std::size_t k, std::size_t bins) {
        if (data.empty()) throw EmptyTrainingSetError("discretizer needs training rows");
        const auto dim = data.front().size();
        k = std::min(k, dim);
        std::vector<double> mean(dim, 0.0), var(dim, 0.0);
        for (const auto& v : data)
            for (std::size_t j = 0; j < dim; ++j) mean[j] += v[j];
        for (auto& m : mean) m /= static_cast<double>(data.size());
        for (const auto& v : data)
            for (std::size_t j = 0; j < dim; ++j) var[j] += (v[j] - mean[j]) * (v[j] - mean[j]);

        std::vector<std::size_t> order(dim);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return var[a] > var[b]; });
        order.resize(k);

        std::vector<double> lo, hi;
        for (auto f : order) {
            double l = std::numeric_limits<double>::infinity(), h = -l;
            for (const auto& v : data) {
                l = std::min(l, v[f]);
                h = std::max(h, v[f]);
            }
            lo.push_back(l);
            hi.push_back(h);
        }
        return Discretizer(std::move(order), std::move(lo), std::move(hi), bins);
    }

    bool fitted() const { return bins_ > 0; }
    std::size_t bins() const { return bins_; }
    const std::vector<std::size_t>& features() const { return features_; }
    const std::vector<double>& lo() const { return lo_; }
    const std::vector<double>& hi() const { return hi_; }

    std::size_t state_count() const {
        std::size_t n = 1;
        for (std::size_t i = 0; i < features_.size(); ++i) n *= bins_;
        return n;
    }

    std::size_t bin(std::size_t i, double value) const {
        const double range = hi_[i] - lo_[i];
        if (!(range > 0.0)) return 0;
        const double t = (value - lo_[i]) / range * static_cast<double>(bins_);
        if (!(t > 0.0)) return 0;
        return std::min(bins_ - 1, static_cast<std::size_t>(t));
    }

    /// Mixed-radix index of the bin coordinates (first feature least significant).
    StateId operator()(std::span<const double> v) const {
        if (!fitted()) throw UnfittedSpecError("discretizer has not been fitted");
        std::size_t id = 0, radix = 1;
        for (std::size_t i = 0; i < features_.size(); ++i) {
            if (features_[i] >= v.size()) throw DimensionMismatchError("vector too short for discretizer");
            id += bin(i, v[features_[i]]) * radix;
            radix *= bins_;
        }
        return static_cast<StateId>(id);
    }

private:
    void check() const {
        if (bins_ < 1) throw std::invalid_argument("discretizer needs at least one bin");
        if (lo_.size() != features_.size() || hi_.size() != features_.size())
            throw DimensionMismatchError("discretizer ranges do not match feature list");
        double states = 1.0;
        for (std::size_t i = 0; i < features_.size(); ++i) states *= static_cast<double>(bins_);
        if (states > static_cast<double>(kMaxStates))
            throw std::invalid_argument("discretizer state space exceeds " + std::to_string(kMaxStates));
    }

    std::vector<std::size_t> features_;
    std::vector<double> lo_, hi_;
    std::size_t bins_ = 0;
};

inline StateId discretize(std::span<const double> v, const Discretizer& spec) { return spec(v); }

// ---------------------------------------------------------------------------
// Tables

/// Dense action-value table. Entries never written read as the default.
class QTable {
public:
    QTable() = default;
    QTable(std::size_t states, std::size_t actions, double initial = 0.0)
        : states_(states), actions_(actions), initial_(initial), values_(states * actions, initial),
          seen_(states * actions, 0) {}

    std::size_t states() const { return states_; }
    std::size_t actions() const { return actions_; }

    double operator()(StateId s, ActionId a) const { return values_[index(s, a)]; }
    bool seen(StateId s, ActionId a) const { return seen_[index(s, a)] != 0; }

    void set(StateId s, ActionId a, double v) {
        values_[index(s, a)] = v;
        seen_[index(s, a)] = 1;
    }

    double max(StateId s) const {
        double m = values_[index(s, 0)];
        for (ActionId a = 1; a < actions_; ++a) m = std::max(m, values_[index(s, a)]);
        return m;
    }

    /// Greedy action; ties go to the lowest action index.
    ActionId greedy(StateId s) const {
        ActionId best = 0;
        for (ActionId a = 1; a < actions_; ++a)
            if (values_[index(s, a)] > values_[index(s, best)]) best = a;
        return best;
    }

    friend bool operator==(const QTable&, const QTable&) = default;

private:
    std::size_t index(StateId s, ActionId a) const {
        if (s >= states_ || a >= actions_) throw std::out_of_range("QTable index out of range");
        return static_cast<std::size_t>(s) * actions_ + a;
    }

    std::size_t states_ = 0, actions_ = 0;
    double initial_ = 0.0;
    std::vector<double> values_;
    std::vector<char> seen_;
};

class VTable {
public:
    VTable() = default;
    explicit VTable(std::size_t states, double initial = 0.0) : values_(states, initial) {}

    std::size_t states() const { return values_.size(); }
    double operator()(StateId s) const { return values_.at(s); }
    void set(StateId s, double v) { values_.at(s) = v; }
    const std::vector<double>& values() const { return values_; }

    friend bool operator==(const VTable&, const VTable&) = default;

private:
    std::vector<double> values_;
};

/// Step sizes for a single update. Closed bounds so the degenerate cases
/// (alpha = 1, gamma = 0) stay expressible.
struct Step {
    double alpha = 0.1;
    double gamma = 0.9;
};

/// Q(s,a) <- (1 - alpha) Q(s,a) + alpha (r + gamma max_a' Q(s', a')).
inline void q_update(QTable& q, StateId s, ActionId a, double r, StateId next, const Step& st,
                     bool terminal = false) {
    const double target = r + (terminal ? 0.0 : st.gamma * q.max(next));
    q.set(s, a, (1.0 - st.alpha) * q(s, a) + st.alpha * target);
}

/// Q(s,a) <- Q(s,a) + alpha (r + gamma Q(s', a') - Q(s,a)).
inline void sarsa_update(QTable& q, StateId s, ActionId a, double r, StateId next, ActionId next_action,
                         const Step& st, bool terminal = false) {
    const double target = r + (terminal ? 0.0 : st.gamma * q(next, next_action));
    q.set(s, a, (1.0 - st.alpha) * q(s, a) + st.alpha * target);
}

/// V(s) <- V(s) + alpha (r + gamma V(s') - V(s)).
inline void td_update(VTable& v, StateId s, double r, StateId next, const Step& st,
                      bool terminal = false) {
    const double target = r + (terminal ? 0.0 : st.gamma * v(next));
    v.set(s, (1.0 - st.alpha) * v(s) + st.alpha * target);
}

// ---------------------------------------------------------------------------
// Explicit MDPs

struct MdpSpec {
    std::size_t states = 0;
    std::size_t actions = 0;
    std::vector<double> transition; ///< [s][a][s']
    std::vector<double> reward;     ///< [s][a][s']
    double discount = 0.9;

    MdpSpec() = default;
    MdpSpec(std::size_t s, std::size_t a, double r)
        : states(s), actions(a), transition(s * a * s, 0.0), reward(s * a * s, 0.0), discount(r) {}

    double& p(std::size_t s, std::size_t a, std::size_t s2) { return transition[(s * actions + a) * states + s2]; }
    double p(std::size_t s, std::size_t a, std::size_t s2) const { return transition[(s * actions + a) * states + s2]; }
    double& r(std::size_t s, std::size_t a, std::size_t s2) { return reward[(s * actions + a) * states + s2]; }
    double r(std::size_t s, std::size_t a, std::size_t s2) const { return reward[(s * actions + a) * states + s2]; }

    void validate(double tol = 1e-9) const {
        if (transition.size() != states * actions * states || reward.size() != transition.size())
            throw DimensionMismatchError("MDP tables do not match state/action counts");
        for (std::size_t s = 0; s < states; ++s) {
            for (std::size_t a = 0; a < actions; ++a) {
                double sum = 0.0;
                for (std::size_t s2 = 0; s2 < states; ++s2) {
                    if (p(s, a, s2) < 0.0)
                        throw NonStochasticTransitionError("negative transition probability");
                    sum += p(s, a, s2);
                }
                if (std::abs(sum - 1.0) > tol)
                    throw NonStochasticTransitionError("transition row (" + std::to_string(s) + "," +
                                                       std::to_string(a) + ") sums to " + std::to_string(sum));
            }
        }
    }

    /// sum_s' P(s'|s,a) [R(s,a,s') + discount V(s')].
    double backup(std::size_t s, std::size_t a, std::span<const double> v) const {
        double q = 0.0;
        for (std::size_t s2 = 0; s2 < states; ++s2) q += p(s, a, s2) * (r(s, a, s2) + discount * v[s2]);
        return q;
    }
};

struct ValueIterationResult {
    std::vector<double> values;
    std::vector<ActionId> policy;
    std::vector<double> residuals; ///< sup-norm change of every sweep
};

/// V_{k+1}(s) = max_a sum_s' P(s'|s,a)[R(s,a,s') + r V_k(s')] until the
/// sup-norm change drops below tol.
inline ValueIterationResult value_iteration(const MdpSpec& mdp, double tol = 1e-10,
                                            std::size_t max_sweeps = 100000) {
    mdp.validate();
    if (!(mdp.discount >= 0.0 && mdp.discount < 1.0))
        throw std::invalid_argument("value iteration needs a discount in [0,1)");
    ValueIterationResult out;
    std::vector<double> v(mdp.states, 0.0), next(mdp.states);
    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        double change = 0.0;
        for (std::size_t s = 0; s < mdp.states; ++s) {
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t a = 0; a < mdp.actions; ++a) best = std::max(best, mdp.backup(s, a, v));
            next[s] = best;
            change = std::max(change, std::abs(best - v[s]));
        }
        v.swap(next);
        out.residuals.push_back(change);
        if (change < tol) break;
    }
    out.values = v;
    out.policy.resize(mdp.states);
    for (std::size_t s = 0; s < mdp.states; ++s) {
        ActionId best = 0;
        for (ActionId a = 1; a < mdp.actions; ++a)
            if (mdp.backup(s, a, v) > mdp.backup(s, best, v)) best = a;
        out.policy[s] = best;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Agents

struct AgentConfig {
    double alpha = 0.1;
    double gamma = 0.9;
    double epsilon_start = 1.0;
    double epsilon_decay = 0.995; ///< multiplicative, per episode
    double epsilon_floor = 0.01;
    /// Per-pair step decay: alpha / (1 + alpha_decay * visits(s,a)).
    double alpha_decay = 0.0;
    std::size_t episodes = 100;
    std::uint64_t seed = 1;

    void validate() const {
        if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("learning rate must lie in (0,1)");
        if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("discount must lie in (0,1)");
        if (!(epsilon_floor >= 0.0 && epsilon_floor <= 1.0 && epsilon_start >= 0.0 && epsilon_start <= 1.0))
            throw std::invalid_argument("exploration rates must lie in [0,1]");
        if (!(epsilon_decay > 0.0 && epsilon_decay <= 1.0))
            throw std::invalid_argument("epsilon decay must lie in (0,1]");
        if (alpha_decay < 0.0) throw std::invalid_argument("alpha decay must be nonnegative");
    }

    double epsilon(std::size_t episode) const {
        return std::max(epsilon_floor, epsilon_start * std::pow(epsilon_decay, static_cast<double>(episode)));
    }
};

enum class Algorithm { QLearning, Sarsa };

struct Transition {
    double reward = 0.0;
    StateId next = 0;
    bool terminal = false;     ///< no bootstrap past this step
    bool episode_over = false; ///< stop the episode after this step
};

/// An environment provides `state_count()`, `action_count()`,
/// `StateId begin_episode(Rng&)` and `Transition step(StateId, ActionId, Rng&)`.
template <class Env>
concept Environment = requires(Env e, std::mt19937_64& rng, StateId s, ActionId a) {
    { e.state_count() } -> std::convertible_to<std::size_t>;
    { e.action_count() } -> std::convertible_to<std::size_t>;
    { e.begin_episode(rng) } -> std::convertible_to<StateId>;
    { e.step(s, a, rng) } -> std::same_as<Transition>;
};

struct EpisodeTrace {
    std::size_t episode = 0;
    double cumulative_reward = 0.0;
    double epsilon = 0.0;
    std::size_t steps = 0;
};

inline void write_trace(std::ostream& out, std::span<const EpisodeTrace> trace) {
    out << "episode,cumulative_reward,epsilon\n";
    for (const auto& t : trace) out << t.episode << ',' << t.cumulative_reward << ',' << t.epsilon << '\n';
}

struct TrainedAgent {
    QTable q;
    std::vector<EpisodeTrace> trace;
};

namespace detail {

inline ActionId epsilon_greedy(const QTable& q, StateId s, double eps, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) < eps) {
        std::uniform_int_distribution<ActionId> any(0, static_cast<ActionId>(q.actions() - 1));
        return any(rng);
    }
    return q.greedy(s);
}

} // namespace detail

template <Environment Env>
TrainedAgent train_agent(Env& env, Algorithm algorithm, const AgentConfig& cfg) {
    cfg.validate();
    TrainedAgent out{QTable(env.state_count(), env.action_count()), {}};
    std::vector<std::uint32_t> visits(env.state_count() * env.action_count(), 0);
    std::mt19937_64 rng(cfg.seed);
    for (std::size_t ep = 0; ep < cfg.episodes; ++ep) {
        const double eps = cfg.epsilon(ep);
        EpisodeTrace tr{ep, 0.0, eps, 0};
        StateId s = env.begin_episode(rng);
        ActionId a = detail::epsilon_greedy(out.q, s, eps, rng);
        while (true) {
            const auto t = env.step(s, a, rng);
            const ActionId next_action = detail::epsilon_greedy(out.q, t.next, eps, rng);
            auto& n = visits[static_cast<std::size_t>(s) * env.action_count() + a];
            const Step st{cfg.alpha / (1.0 + cfg.alpha_decay * n), cfg.gamma};
            ++n;
            if (algorithm == Algorithm::QLearning)
                q_update(out.q, s, a, t.reward, t.next, st, t.terminal);
            else
                sarsa_update(out.q, s, a, t.reward, t.next, next_action, st, t.terminal);
            tr.cumulative_reward += t.reward;
            ++tr.steps;
            if (t.episode_over) break;
            s = t.next;
            a = next_action;
        }
        out.trace.push_back(tr);
    }
    return out;
}

/// TD(0) evaluation of a fixed stochastic policy (`policy[s][a]` probabilities).
template <Environment Env>
VTable td_evaluate(Env& env, const std::vector<std::vector<double>>& policy, const AgentConfig& cfg) {
    cfg.validate();
    VTable v(env.state_count());
    std::vector<std::uint32_t> visits(env.state_count(), 0);
    std::mt19937_64 rng(cfg.seed);
    for (std::size_t ep = 0; ep < cfg.episodes; ++ep) {
        StateId s = env.begin_episode(rng);
        while (true) {
            std::discrete_distribution<ActionId> pick(policy.at(s).begin(), policy.at(s).end());
            const auto t = env.step(s, pick(rng), rng);
            const Step st{cfg.alpha / (1.0 + cfg.alpha_decay * visits[s]), cfg.gamma};
            ++visits[s];
            td_update(v, s, t.reward, t.next, st, t.terminal);
            if (t.episode_over) break;
            s = t.next;
        }
    }
    return v;
}

/// Samples an explicit MDP. Episodes start in a uniformly random state and are
/// truncated (not terminated) after `horizon` steps.
class MdpEnvironment {
public:
    MdpEnvironment(MdpSpec mdp, std::size_t horizon) : mdp_(std::move(mdp)), horizon_(horizon) {
        mdp_.validate();
    }

    std::size_t state_count() const { return mdp_.states; }
    std::size_t action_count() const { return mdp_.actions; }

    StateId begin_episode(std::mt19937_64& rng) {
        steps_ = 0;
        std::uniform_int_distribution<StateId> start(0, static_cast<StateId>(mdp_.states - 1));
        return start(rng);
    }

    Transition step(StateId s, ActionId a, std::mt19937_64& rng) {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        double x = u(rng);
        std::size_t next = mdp_.states - 1;
        for (std::size_t s2 = 0; s2 < mdp_.states; ++s2) {
            x -= mdp_.p(s, a, s2);
            if (x < 0.0) {
                next = s2;
                break;
            }
        }
        ++steps_;
        return {mdp_.r(s, a, next), static_cast<StateId>(next), false, steps_ >= horizon_};
    }

    const MdpSpec& spec() const { return mdp_; }

private:
    MdpSpec mdp_;
    std::size_t horizon_;
    std::size_t steps_ = 0;
};

/// Labeled traffic as an environment: one episode is one pass over the
/// records in a fresh shuffled order; reward +1 for alarm on intrusive or
/// pass on normal traffic, -1 otherwise.
class TrafficEnvironment {
public:
    TrafficEnvironment(const kdd::Dataset& data, const Discretizer& spec) : spec_(spec) {
        if (!spec.fitted()) throw UnfittedSpecError("discretizer has not been fitted");
        if (data.empty()) throw EmptyTrainingSetError("traffic environment needs records");
        states_.reserve(data.size());
        intrusive_.reserve(data.size());
        for (std::size_t i = 0; i < data.size(); ++i) {
            states_.push_back(spec(data.x[i]));
            intrusive_.push_back(data.truth(i) == Verdict::Intrusive);
        }
        order_.resize(data.size());
        std::iota(order_.begin(), order_.end(), std::size_t{0});
    }

    std::size_t state_count() const { return spec_.state_count(); }
    std::size_t action_count() const { return 2; }

    StateId begin_episode(std::mt19937_64& rng) {
        std::shuffle(order_.begin(), order_.end(), rng);
        pos_ = 0;
        return states_[order_[0]];
    }

    Transition step(StateId, ActionId a, std::mt19937_64&) {
        const auto row = order_[pos_];
        const bool correct = (a == kAlarm) == static_cast<bool>(intrusive_[row]);
        ++pos_;
        const bool last = pos_ >= order_.size();
        return {correct ? 1.0 : -1.0, last ? states_[row] : states_[order_[pos_]], last, last};
    }

    static double reward(ActionId a, Verdict truth) {
        return (a == kAlarm) == (truth == Verdict::Intrusive) ? 1.0 : -1.0;
    }

private:
    const Discretizer& spec_;
    std::vector<StateId> states_;
    std::vector<char> intrusive_;
    std::vector<std::size_t> order_;
    std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Detectors

/// Intrusive iff Q(s, alarm) >= Q(s, pass); unseen states tie at the default.
inline Verdict rl_classify(const QTable& q, StateId s) {
    return q(s, kAlarm) >= q(s, kPass) ? Verdict::Intrusive : Verdict::Normal;
}

inline double rl_score(const QTable& q, StateId s) { return q(s, kAlarm) - q(s, kPass); }

/// TD detector tables: the uniform policy's state values, and per-action
/// values r + gamma V(s') estimated from the transitions that took that action.
struct TdTables {
    VTable policy;
    VTable alarm;
    VTable pass;
    std::vector<EpisodeTrace> trace;
};

inline TdTables train_td_detector(TrafficEnvironment& env, const AgentConfig& cfg) {
    cfg.validate();
    TdTables t{VTable(env.state_count()), VTable(env.state_count()), VTable(env.state_count()), {}};
    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<ActionId> coin(0, 1);
    const Step st{cfg.alpha, cfg.gamma};
    for (std::size_t ep = 0; ep < cfg.episodes; ++ep) {
        EpisodeTrace tr{ep, 0.0, 1.0, 0};
        StateId s = env.begin_episode(rng);
        while (true) {
            const ActionId a = coin(rng);
            const auto x = env.step(s, a, rng);
            // Action value first, so both read the same V(s') snapshot.
            auto& table = a == kAlarm ? t.alarm : t.pass;
            const double bootstrap = x.terminal ? 0.0 : cfg.gamma * t.policy(x.next);
            table.set(s, (1.0 - st.alpha) * table(s) + st.alpha * (x.reward + bootstrap));
            td_update(t.policy, s, x.reward, x.next, st, x.terminal);
            tr.cumulative_reward += x.reward;
            ++tr.steps;
            if (x.episode_over) break;
            s = x.next;
        }
        t.trace.push_back(tr);
    }
    return t;
}

inline Verdict td_classify(const TdTables& t, StateId s) {
    return t.alarm(s) >= t.pass(s) ? Verdict::Intrusive : Verdict::Normal;
}

inline double td_score(const TdTables& t, StateId s) { return t.alarm(s) - t.pass(s); }

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::json to_json(const Discretizer& d) {
    return {{"features", d.features()}, {"lo", d.lo()}, {"hi", d.hi()}, {"bins", d.bins()}};
}

inline Discretizer discretizer_from_json(const nlohmann::json& j) {
    return Discretizer(j.at("features").get<std::vector<std::size_t>>(), j.at("lo").get<std::vector<double>>(),
                       j.at("hi").get<std::vector<double>>(), j.at("bins").get<std::size_t>());
}

inline std::string action_name(ActionId a) { return a == kAlarm ? "alarm" : a == kPass ? "pass" : std::to_string(a); }

/// Written entries only, keyed "stateId:action".
inline nlohmann::json to_json(const QTable& q) {
    nlohmann::json values = nlohmann::json::object();
    for (StateId s = 0; s < q.states(); ++s)
        for (ActionId a = 0; a < q.actions(); ++a)
            if (q.seen(s, a)) values[std::to_string(s) + ":" + action_name(a)] = q(s, a);
    return {{"states", q.states()}, {"actions", q.actions()}, {"values", std::move(values)}};
}

inline QTable qtable_from_json(const nlohmann::json& j) {
    QTable q(j.at("states").get<std::size_t>(), j.at("actions").get<std::size_t>());
    for (const auto& [key, value] : j.at("values").items()) {
        const auto colon = key.find(':');
        if (colon == std::string::npos) throw DataError("bad Q-table key '" + key + "'");
        const auto s = static_cast<StateId>(std::stoul(key.substr(0, colon)));
        const auto name = key.substr(colon + 1);
        const ActionId a = name == "alarm" ? kAlarm : name == "pass" ? kPass : static_cast<ActionId>(std::stoul(name));
        q.set(s, a, value.get<double>());
    }
    return q;
}

inline nlohmann::json to_json(const VTable& v) { return v.values(); }

inline VTable vtable_from_json(const nlohmann::json& j) {
    const auto values = j.get<std::vector<double>>();
    VTable v(values.size());
    for (std::size_t s = 0; s < values.size(); ++s) v.set(static_cast<StateId>(s), values[s]);
    return v;
}

} // namespace sentry::rl
