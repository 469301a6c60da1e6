#pragma once

// Adaptive hybrid detector. Traffic is split between an anomaly subsystem
// (E-DBSCAN) and a misuse subsystem (random forest); the split follows the
// trajectory of each subsystem's smoothed TP/FP ratio.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "sentry/edbscan.hpp"
#include "sentry/error.hpp"
#include "sentry/forest.hpp"
#include "sentry/kdd.hpp"
#include "sentry/topology.hpp"
#include "sentry/types.hpp"

namespace sentry::asch {

struct Config {
    double alpha = 0.7;          ///< weight of the running ratio
    double init = 0.5;           ///< initial mu for both subsystems
    double delta = 0.05;         ///< share moved per reallocation
    double lo = 0.1;             ///< share clamp
    double hi = 0.9;
    double initial_share = 0.5;  ///< starting anomaly share

    void validate() const {
        if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("asch alpha must lie in (0,1)");
        if (!(init > 0.0)) throw std::invalid_argument("asch init must be positive");
        if (!(delta >= 0.0)) throw std::invalid_argument("asch delta must be nonnegative");
        if (!(0.0 <= lo && lo <= hi && hi <= 1.0)) throw std::invalid_argument("asch clamps must satisfy 0 <= lo <= hi <= 1");
        if (initial_share < lo || initial_share > hi)
            throw std::invalid_argument("asch initial share outside clamps");
    }
};

/// Per-window counts; subsystem 1 is anomaly, subsystem 2 is misuse.
struct WindowCounts {
    std::size_t tp1 = 0, fp1 = 0, tp2 = 0, fp2 = 0;
};

struct State {
    Config config;
    double mu1 = 0.5;
    double mu2 = 0.5;
    double indicator = 1.0;
    double previous_indicator = 1.0;
    double share_anomaly = 0.5;
    std::size_t window = 0;
    WindowCounts last;

    double share_misuse() const { return 1.0 - share_anomaly; }
};

inline State initial_state(const Config& c = {}) {
    c.validate();
    State s;
    s.config = c;
    s.mu1 = s.mu2 = c.init;
    s.indicator = s.previous_indicator = 1.0;
    s.share_anomaly = c.initial_share;
    return s;
}

/// Add-one smoothed TP/FP ratio of one window.
inline double window_ratio(std::size_t tp, std::size_t fp) {
    return (static_cast<double>(tp) + 1.0) / (static_cast<double>(fp) + 1.0);
}

/// mu_k <- alpha mu_k + (1 - alpha) mu_k(window); I <- mu1/mu2.
inline State asch_ratio_update(State s, const WindowCounts& w) {
    const double a = s.config.alpha;
    s.mu1 = a * s.mu1 + (1.0 - a) * window_ratio(w.tp1, w.fp1);
    s.mu2 = a * s.mu2 + (1.0 - a) * window_ratio(w.tp2, w.fp2);
    s.previous_indicator = s.indicator;
    s.indicator = s.mu1 / s.mu2;
    s.last = w;
    ++s.window;
    return s;
}

/// Moves `delta` of the traffic toward the subsystem whose indicator trend
/// improved, clamped to [lo, hi].
inline State asch_reallocate(State s) {
    const auto& c = s.config;
    if (s.indicator > s.previous_indicator)
        s.share_anomaly = std::min(c.hi, s.share_anomaly + c.delta);
    else if (s.indicator < s.previous_indicator)
        s.share_anomaly = std::max(c.lo, s.share_anomaly - c.delta);
    return s;
}

struct HybridModel {
    forest::Forest misuse;
    edbscan::Model anomaly;
};

enum class Mode {
    Frozen,   ///< shares stay fixed, no labels consulted
    Adaptive, ///< labeled window counts update the split after every batch
};

enum class Route : std::uint8_t { Anomaly, Misuse };

struct BatchResult {
    std::vector<Verdict> verdicts; ///< in batch order
    std::vector<double> scores;
    std::vector<Route> routes;
    State state;
};

/// Classifies one slot batch. A seeded random round(D_a * n) records go to
/// the anomaly subsystem, the rest to misuse.
inline BatchResult hybrid_classify(const State& s, const HybridModel& model,
                                   const kdd::Dataset& data, const wsn::SlotBatch& batch,
                                   std::uint64_t seed, Mode mode = Mode::Frozen) {
    if (model.misuse.trees.empty() || !model.anomaly.fitted)
        throw UnfittedModelError("hybrid detector needs both subsystems trained");
    const auto n = batch.rows.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (batch.slot + 1)));
    std::shuffle(order.begin(), order.end(), rng);
    const auto to_anomaly = static_cast<std::size_t>(std::lround(s.share_anomaly * static_cast<double>(n)));

    BatchResult out;
    out.verdicts.resize(n);
    out.scores.resize(n);
    out.routes.resize(n);
    WindowCounts w;
    for (std::size_t k = 0; k < n; ++k) {
        const auto pos = order[k];
        const auto row = batch.rows[pos];
        const auto& x = data.x[row];
        const bool truth = data.truth(row) == Verdict::Intrusive;
        if (k < to_anomaly) {
            out.routes[pos] = Route::Anomaly;
            out.scores[pos] = edbscan::anomaly_score(model.anomaly, x);
            out.verdicts[pos] = edbscan::anomaly_classify(model.anomaly, x);
            if (out.verdicts[pos] == Verdict::Intrusive) (truth ? w.tp1 : w.fp1) += 1;
        } else {
            out.routes[pos] = Route::Misuse;
            const auto vote = forest::forest_classify(model.misuse, x);
            out.scores[pos] = vote.vote_share;
            out.verdicts[pos] = vote.verdict;
            if (vote.verdict == Verdict::Intrusive) (truth ? w.tp2 : w.fp2) += 1;
        }
    }
    out.state = mode == Mode::Adaptive ? asch_reallocate(asch_ratio_update(s, w)) : s;
    return out;
}

inline void write_trace_header(std::ostream& out) {
    out << "window,mu1,mu2,indicator,share_anomaly,share_misuse,tp1,fp1,tp2,fp2\n";
}

inline void write_trace_row(std::ostream& out, const State& s) {
    out << s.window << ',' << s.mu1 << ',' << s.mu2 << ',' << s.indicator << ','
        << s.share_anomaly << ',' << s.share_misuse() << ',' << s.last.tp1 << ',' << s.last.fp1
        << ',' << s.last.tp2 << ',' << s.last.fp2 << '\n';
}

} // namespace sentry::asch
