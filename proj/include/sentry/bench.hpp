#pragma once

// Experiment orchestration: dataset preparation, detector training, frozen
// evaluation over the slot stream, multi-run aggregation and report files.

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "sentry/asch.hpp"
#include "sentry/config.hpp"
#include "sentry/edbscan.hpp"
#include "sentry/error.hpp"
#include "sentry/forest.hpp"
#include "sentry/kdd.hpp"
#include "sentry/metrics.hpp"
#include "sentry/rbm.hpp"
#include "sentry/rl.hpp"
#include "sentry/topology.hpp"
#include "sentry/types.hpp"

namespace sentry::bench {

using config::ExperimentConfig;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent stream `tag` derived from `seed`.
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t tag) { return splitmix64(seed ^ splitmix64(tag)); }

inline std::uint64_t run_seed(std::uint64_t master, std::size_t run) { return derive(master, 1000 + run); }

// ---------------------------------------------------------------------------
// Data

struct Corpus {
    std::vector<kdd::ConnectionRecord> train;
    std::vector<kdd::ConnectionRecord> test; ///< empty: hold out part of the train sample
    kdd::ParseReport train_report;
    kdd::ParseReport test_report;
};

inline Corpus load_corpus(const ExperimentConfig& cfg) {
    if (cfg.train.empty()) throw ConfigError("key 'train': no training file given");
    Corpus c;
    c.train = kdd::read_records(cfg.train, c.train_report, cfg.skip_bad);
    if (!cfg.test.empty()) c.test = kdd::read_records(cfg.test, c.test_report, cfg.skip_bad);
    if (c.train.empty()) throw DataError("training file '" + cfg.train + "' holds no records");
    return c;
}

struct RunData {
    kdd::Dataset train;
    kdd::Dataset test;
};

namespace detail {

inline std::vector<kdd::ConnectionRecord> sample_records(const std::vector<kdd::ConnectionRecord>& all,
                                                         double fraction, std::uint64_t seed) {
    std::vector<std::size_t> order(all.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    const auto n = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(fraction * static_cast<double>(all.size()))));
    std::vector<kdd::ConnectionRecord> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n && i < order.size(); ++i) out.push_back(all[order[i]]);
    return out;
}

} // namespace detail

/// Seeded train/test samples, encoded with a table built on the train sample
/// and min-max scaled with train bounds.
inline RunData prepare_run(const Corpus& corpus, const ExperimentConfig& cfg, std::uint64_t seed) {
    auto train = detail::sample_records(corpus.train, cfg.train_fraction, derive(seed, 1));
    std::vector<kdd::ConnectionRecord> test;
    if (corpus.test.empty()) {
        const auto cut = static_cast<std::size_t>(
            std::floor((1.0 - cfg.holdout_fraction) * static_cast<double>(train.size())));
        test.assign(train.begin() + static_cast<std::ptrdiff_t>(cut), train.end());
        train.resize(cut);
    } else {
        test = detail::sample_records(corpus.test, cfg.test_fraction, derive(seed, 2));
    }
    auto labels = kdd::LabelMap::kdd();
    labels.set_mode(cfg.labels);
    const auto table = kdd::EncodingTable::build(train);
    kdd::ParseReport scratch;
    RunData d;
    d.train = kdd::to_dataset(train, table, labels, scratch);
    d.test = kdd::to_dataset(test, table, labels, scratch, kdd::EncodingTable::Unknown::MapToUnseen);
    if (d.train.empty()) throw EmptyTrainingSetError("training sample is empty");
    if (d.test.empty()) throw DataError("test sample is empty");
    const auto bounds = kdd::fit_normalizer(d.train);
    d.train = kdd::apply_normalizer(bounds, d.train);
    d.test = kdd::apply_normalizer(bounds, d.test);
    return d;
}

// ---------------------------------------------------------------------------
// Detectors

struct AschDetector {
    asch::HybridModel model;
    asch::State state;
    std::vector<asch::State> tuning;
};

struct RlDetector {
    rl::Discretizer spec;
    rl::QTable q;
    std::vector<rl::EpisodeTrace> trace;
};

struct TdDetector {
    rl::Discretizer spec;
    rl::TdTables tables;
};

using Detector = std::variant<AschDetector, rbm::RbmStack, RlDetector, TdDetector>;

inline asch::Config asch_config(const ExperimentConfig& cfg) {
    asch::Config c;
    c.alpha = cfg.asch.alpha;
    c.init = cfg.asch.init;
    c.delta = cfg.asch.delta;
    c.lo = cfg.asch.lo;
    c.hi = cfg.asch.hi;
    return c;
}

inline rl::AgentConfig agent_config(const ExperimentConfig& cfg, std::uint64_t seed) {
    rl::AgentConfig a;
    a.alpha = cfg.rl.alpha;
    a.gamma = cfg.rl.gamma;
    a.epsilon_start = cfg.rl.epsilon_start;
    a.epsilon_decay = cfg.rl.epsilon_decay;
    a.epsilon_floor = cfg.rl.epsilon_floor;
    a.alpha_decay = cfg.rl.alpha_decay;
    a.episodes = cfg.rl.episodes;
    a.seed = seed;
    return a;
}

/// Forest on the fit slice, E-DBSCAN on a normal-only subsample of it, then
/// adaptive splitting over the tuning slice.
inline AschDetector train_asch(const kdd::Dataset& train, const wsn::Topology& topo,
                               const ExperimentConfig& cfg, std::uint64_t seed) {
    auto [fit, tune] = kdd::sample_split(train, 1.0 - cfg.asch.tune_fraction, derive(seed, 10));
    if (fit.empty()) throw EmptyTrainingSetError("ASCH fit slice is empty");
    AschDetector d;
    forest::ForestParams fp;
    fp.trees = cfg.forest.trees;
    fp.features_per_split = cfg.forest.features;
    fp.max_depth = cfg.forest.max_depth;
    fp.min_leaf = cfg.forest.min_leaf;
    fp.seed = derive(seed, 11);
    d.model.misuse = forest::train_forest(fit, fp);

    std::vector<FeatureVector> normal;
    for (std::size_t i = 0; i < fit.size(); ++i)
        if (fit.truth(i) == Verdict::Normal) normal.push_back(fit.x[i]);
    if (normal.empty())
        for (const auto& x : fit.x) normal.push_back(x);
    std::mt19937_64 rng(derive(seed, 12));
    std::shuffle(normal.begin(), normal.end(), rng);
    if (normal.size() > cfg.dbscan.sample) normal.resize(cfg.dbscan.sample);
    edbscan::Params ep;
    ep.min_pts = cfg.dbscan.min_pts;
    ep.variance_threshold = cfg.dbscan.variance;
    ep.epsilon = cfg.dbscan.epsilon > 0.0 ? cfg.dbscan.epsilon : edbscan::suggest_epsilon(normal, ep.min_pts);
    d.model.anomaly = edbscan::edbscan_fit(normal, ep);

    d.state = asch::initial_state(asch_config(cfg));
    if (!tune.empty()) {
        for (const auto& batch : wsn::stream_slots(tune, topo, cfg.slot_length)) {
            d.state = asch::hybrid_classify(d.state, d.model, tune, batch, derive(seed, 13), asch::Mode::Adaptive).state;
            d.tuning.push_back(d.state);
        }
    }
    return d;
}

inline Detector train_detector(const std::string& name, const kdd::Dataset& train, const wsn::Topology& topo,
                               const ExperimentConfig& cfg, std::uint64_t seed) {
    if (name == "asch") return train_asch(train, topo, cfg, seed);
    if (name == "rbc") {
        rbm::StackParams p;
        p.hidden = cfg.rbm.hidden;
        p.epochs = cfg.rbm.epochs;
        p.learning_rate = cfg.rbm.learning_rate;
        p.batch = cfg.rbm.batch;
        p.seed = derive(seed, 20);
        return rbm::train_stack(train, p);
    }
    auto spec = rl::Discretizer::fit(train.x, cfg.rl.features, cfg.rl.bins);
    rl::TrafficEnvironment env(train, spec);
    const auto agent = agent_config(cfg, derive(seed, 30));
    if (name == "td") {
        auto tables = rl::train_td_detector(env, agent);
        return TdDetector{std::move(spec), std::move(tables)};
    }
    const auto algo = name == "sarsa" ? rl::Algorithm::Sarsa : rl::Algorithm::QLearning;
    auto trained = rl::train_agent(env, algo, agent);
    return RlDetector{std::move(spec), std::move(trained.q), std::move(trained.trace)};
}

struct Evaluation {
    std::vector<Verdict> verdicts; ///< dataset order
    std::vector<double> scores;
    std::vector<asch::State> trace; ///< adaptive evaluation only
};

/// Classifies the stream slot by slot. Detectors stay frozen unless adaptive
/// ASCH evaluation is requested.
inline Evaluation evaluate(const Detector& det, const kdd::Dataset& test, const wsn::Topology& topo,
                           const ExperimentConfig& cfg, std::uint64_t seed) {
    Evaluation ev;
    ev.verdicts.resize(test.size());
    ev.scores.resize(test.size());
    const auto slots = wsn::stream_slots(test, topo, cfg.slot_length);
    if (const auto* a = std::get_if<AschDetector>(&det)) {
        auto state = a->state;
        const auto mode = cfg.asch.adaptive_eval ? asch::Mode::Adaptive : asch::Mode::Frozen;
        for (const auto& batch : slots) {
            auto r = asch::hybrid_classify(state, a->model, test, batch, derive(seed, 14), mode);
            for (std::size_t k = 0; k < batch.rows.size(); ++k) {
                ev.verdicts[batch.rows[k]] = r.verdicts[k];
                ev.scores[batch.rows[k]] = r.scores[k];
            }
            state = r.state;
            if (mode == asch::Mode::Adaptive) ev.trace.push_back(state);
        }
        return ev;
    }
    for (const auto& batch : slots) {
        for (auto row : batch.rows) {
            const auto& x = test.x[row];
            std::visit(
                [&](const auto& d) {
                    using T = std::decay_t<decltype(d)>;
                    if constexpr (std::is_same_v<T, rbm::RbmStack>) {
                        const auto p = rbm::classify(d, x);
                        ev.verdicts[row] = p.verdict();
                        ev.scores[row] = p.intrusive;
                    } else if constexpr (std::is_same_v<T, RlDetector>) {
                        const auto s = d.spec(x);
                        ev.verdicts[row] = rl::rl_classify(d.q, s);
                        ev.scores[row] = rl::rl_score(d.q, s);
                    } else if constexpr (std::is_same_v<T, TdDetector>) {
                        const auto s = d.spec(x);
                        ev.verdicts[row] = rl::td_classify(d.tables, s);
                        ev.scores[row] = rl::td_score(d.tables, s);
                    }
                },
                det);
        }
    }
    return ev;
}

inline nlohmann::json state_json(const asch::State& s) {
    return {{"mu1", s.mu1},
            {"mu2", s.mu2},
            {"indicator", s.indicator},
            {"share_anomaly", s.share_anomaly},
            {"share_misuse", s.share_misuse()},
            {"window", s.window}};
}

inline nlohmann::json to_json(const Detector& det) {
    return std::visit(
        [](const auto& d) -> nlohmann::json {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, AschDetector>) {
                return {{"kind", "asch"},
                        {"forest", forest::to_json(d.model.misuse)},
                        {"edbscan", edbscan::to_json(d.model.anomaly)},
                        {"state", state_json(d.state)}};
            } else if constexpr (std::is_same_v<T, rbm::RbmStack>) {
                return {{"kind", "rbc"}, {"stack", rbm::to_json(d)}};
            } else if constexpr (std::is_same_v<T, RlDetector>) {
                return {{"kind", "rl"}, {"discretizer", rl::to_json(d.spec)}, {"q", rl::to_json(d.q)}};
            } else {
                return {{"kind", "td"},
                        {"discretizer", rl::to_json(d.spec)},
                        {"policy", rl::to_json(d.tables.policy)},
                        {"alarm", rl::to_json(d.tables.alarm)},
                        {"pass", rl::to_json(d.tables.pass)}};
            }
        },
        det);
}

// ---------------------------------------------------------------------------
// Runs

struct GroupCount {
    std::size_t rows = 0;
    std::size_t flagged = 0;
};

struct RunResult {
    std::size_t run = 0;
    std::uint64_t seed = 0;
    std::size_t train_rows = 0;
    std::size_t test_rows = 0;
    metrics::Report report;
    std::map<kdd::AttackClass, GroupCount> groups;
    metrics::RocCurve roc;
    std::vector<asch::State> tuning;
    std::vector<asch::State> eval_trace;
    wsn::Topology topology;
    double seconds = 0.0;
};

inline RunResult run_once(const Corpus& corpus, const ExperimentConfig& cfg, const std::string& detector,
                          std::size_t run) {
    const auto start = std::chrono::steady_clock::now();
    RunResult r;
    r.run = run;
    r.seed = run_seed(cfg.seed, run);
    const auto data = prepare_run(corpus, cfg, r.seed);
    r.train_rows = data.train.size();
    r.test_rows = data.test.size();
    r.topology = wsn::build_topology(cfg.nodes, cfg.clusters, derive(r.seed, 3));
    const auto det = train_detector(detector, data.train, r.topology, cfg, derive(r.seed, 4));
    if (const auto* a = std::get_if<AschDetector>(&det)) r.tuning = a->tuning;
    auto ev = evaluate(det, data.test, r.topology, cfg, derive(r.seed, 5));
    r.eval_trace = std::move(ev.trace);

    metrics::ConfusionCounts counts;
    std::vector<metrics::Scored> scored(data.test.size());
    for (std::size_t i = 0; i < data.test.size(); ++i) {
        const auto truth = data.test.truth(i);
        counts = metrics::accumulate(counts, ev.verdicts[i], truth);
        scored[i] = {ev.scores[i], truth};
        auto& g = r.groups[data.test.group[i]];
        ++g.rows;
        g.flagged += ev.verdicts[i] == Verdict::Intrusive;
    }
    std::optional<double> auc;
    if (counts.tp + counts.fn > 0 && counts.fp + counts.tn > 0) {
        r.roc = metrics::roc_curve(scored);
        auc = r.roc.auc;
    }
    r.report = metrics::make_report(counts, auc);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

inline const std::vector<std::string>& metric_names() {
    static const std::vector<std::string> names = {"ar", "dr", "fnr", "precision", "recall", "f1", "auc"};
    return names;
}

inline std::optional<double> metric_value(const metrics::Report& r, const std::string& name) {
    if (name == "ar") return r.ar;
    if (name == "dr") return r.dr;
    if (name == "fnr") return r.fnr;
    if (name == "precision") return r.precision;
    if (name == "recall") return r.recall;
    if (name == "f1") return r.f1;
    if (name == "auc") return r.auc;
    throw std::invalid_argument("unknown metric " + name);
}

struct RunReport {
    std::string detector;
    std::vector<RunResult> runs;
    std::map<std::string, metrics::MeanCi> aggregate; ///< over runs where the metric is defined
};

inline RunReport aggregate(std::string detector, std::vector<RunResult> runs) {
    RunReport rep;
    rep.detector = std::move(detector);
    rep.runs = std::move(runs);
    for (const auto& m : metric_names()) {
        std::vector<double> values;
        for (const auto& r : rep.runs)
            if (auto v = metric_value(r.report, m)) values.push_back(*v);
        rep.aggregate[m] = metrics::mean_ci(values);
    }
    return rep;
}

inline RunReport run_detector(const Corpus& corpus, const ExperimentConfig& cfg, const std::string& detector) {
    std::vector<RunResult> runs;
    for (std::size_t k = 0; k < cfg.runs; ++k) runs.push_back(run_once(corpus, cfg, detector, k));
    return aggregate(detector, std::move(runs));
}

// ---------------------------------------------------------------------------
// Report files

namespace detail {

inline std::string fixed(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

inline std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write '" + p.string() + "'");
    return out;
}

} // namespace detail

inline nlohmann::json metrics_json(const RunReport& rep, const config::Settings& settings) {
    nlohmann::json j;
    j["detector"] = rep.detector;
    j["config"] = settings.to_json();
    j["config"]["detector"] = rep.detector;
    j["runs"] = nlohmann::json::array();
    for (const auto& r : rep.runs) {
        nlohmann::json groups = nlohmann::json::object();
        for (const auto& [g, c] : r.groups)
            groups[std::string(kdd::to_string(g))] = {
                {"rows", c.rows}, {"flagged", c.flagged},
                {"flagged_rate", static_cast<double>(c.flagged) / static_cast<double>(c.rows)}};
        j["runs"].push_back({{"run", r.run},
                             {"seed", r.seed},
                             {"train_rows", r.train_rows},
                             {"test_rows", r.test_rows},
                             {"metrics", metrics::to_json(r.report)},
                             {"groups", groups}});
    }
    for (const auto& [m, ci] : rep.aggregate)
        j["aggregate"][m] = {{"mean", ci.mean}, {"half_width", ci.half_width}, {"n", ci.n}};
    return j;
}

inline void write_comparison_csv(std::ostream& out, const std::vector<RunReport>& reports) {
    out << "detector,runs";
    for (const auto& m : metric_names()) out << ',' << m << "_mean," << m << "_ci";
    out << '\n';
    for (const auto& rep : reports) {
        out << rep.detector << ',' << rep.runs.size();
        for (const auto& m : metric_names()) {
            const auto& ci = rep.aggregate.at(m);
            if (ci.n == 0) out << ",,";
            else out << ',' << detail::fixed(ci.mean) << ',' << detail::fixed(ci.half_width);
        }
        out << '\n';
    }
}

inline void write_text_table(std::ostream& out, const std::vector<RunReport>& reports) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-8s", "detector");
    out << buf;
    for (const auto& m : metric_names()) {
        std::snprintf(buf, sizeof buf, " %19s", m.c_str());
        out << buf;
    }
    out << '\n';
    for (const auto& rep : reports) {
        std::snprintf(buf, sizeof buf, "%-8s", rep.detector.c_str());
        out << buf;
        for (const auto& m : metric_names()) {
            const auto& ci = rep.aggregate.at(m);
            if (ci.n == 0) std::snprintf(buf, sizeof buf, " %19s", "n/a");
            else std::snprintf(buf, sizeof buf, " %9.4f +- %6.4f", ci.mean, ci.half_width);
            out << buf;
        }
        out << '\n';
    }
}

inline void write_splitter_trace(std::ostream& out, const RunResult& r) {
    out << "phase,";
    asch::write_trace_header(out);
    for (const auto& s : r.tuning) {
        out << "tune,";
        asch::write_trace_row(out, s);
    }
    for (const auto& s : r.eval_trace) {
        out << "eval-adaptive,";
        asch::write_trace_row(out, s);
    }
}

/// metrics.json, roc_<detector>.csv, splitter_trace.csv (ASCH), topology.json
/// and timing.json for one detector. ROC and traces come from run 0.
inline void write_run_files(const std::filesystem::path& dir, const RunReport& rep,
                            const config::Settings& settings, const std::string& roc_name) {
    std::filesystem::create_directories(dir);
    {
        auto out = detail::open_out(dir / "metrics.json");
        out << metrics_json(rep, settings).dump(2) << '\n';
    }
    const auto& first = rep.runs.front();
    {
        auto out = detail::open_out(dir / ("roc_" + roc_name + ".csv"));
        metrics::write_roc_csv(out, first.roc);
    }
    if (rep.detector == "asch") {
        auto out = detail::open_out(dir / "splitter_trace.csv");
        write_splitter_trace(out, first);
    }
    {
        auto out = detail::open_out(dir / "topology.json");
        out << wsn::to_json(first.topology).dump(2) << '\n';
    }
    {
        nlohmann::json t;
        for (const auto& r : rep.runs) t["seconds_per_run"].push_back(r.seconds);
        auto out = detail::open_out(dir / "timing.json");
        out << t.dump(2) << '\n';
    }
}

/// Runs the configured detector and writes its report files plus a one-row
/// comparison.csv.
inline RunReport run_experiment(const Corpus& corpus, const ExperimentConfig& cfg) {
    auto rep = run_detector(corpus, cfg, cfg.detector);
    const std::filesystem::path dir(cfg.output);
    write_run_files(dir, rep, cfg.settings, rep.detector);
    auto out = detail::open_out(dir / "comparison.csv");
    write_comparison_csv(out, {rep});
    return rep;
}

inline RunReport run_experiment(const ExperimentConfig& cfg) { return run_experiment(load_corpus(cfg), cfg); }

/// One row per config, in order. Each config writes into its own
/// subdirectory; ROC files are collected at the top level.
inline std::vector<RunReport> compare(const Corpus& corpus, const std::vector<ExperimentConfig>& cfgs,
                                      const std::filesystem::path& dir) {
    if (cfgs.size() < 2) throw ConfigError("compare needs at least two configurations");
    std::filesystem::create_directories(dir);
    std::vector<RunReport> reports;
    std::map<std::string, int> seen;
    for (std::size_t i = 0; i < cfgs.size(); ++i) {
        auto rep = run_detector(corpus, cfgs[i], cfgs[i].detector);
        const int k = seen[rep.detector]++;
        const auto name = k == 0 ? rep.detector : rep.detector + "_" + std::to_string(k);
        write_run_files(dir / name, rep, cfgs[i].settings, name);
        auto roc = detail::open_out(dir / ("roc_" + name + ".csv"));
        metrics::write_roc_csv(roc, rep.runs.front().roc);
        reports.push_back(std::move(rep));
    }
    auto out = detail::open_out(dir / "comparison.csv");
    write_comparison_csv(out, reports);
    auto table = detail::open_out(dir / "comparison.txt");
    write_text_table(table, reports);
    return reports;
}

/// One config per entry of `detectors`, all sharing the base settings.
inline std::vector<ExperimentConfig> detector_configs(const ExperimentConfig& base) {
    std::vector<ExperimentConfig> out;
    for (const auto& d : base.detectors) {
        auto s = base.settings;
        s.set("detector", d);
        out.push_back(config::from_settings(s));
    }
    return out;
}

/// Repeats the experiment for every master seed in `seeds`.
inline std::vector<RunReport> sweep(const Corpus& corpus, const ExperimentConfig& base) {
    if (base.seeds.empty()) throw ConfigError("key 'seeds': sweep needs at least one seed");
    const std::filesystem::path dir(base.output);
    std::filesystem::create_directories(dir);
    std::vector<RunReport> reports;
    auto csv = detail::open_out(dir / "sweep.csv");
    csv << "seed,runs";
    for (const auto& m : metric_names()) csv << ',' << m << "_mean," << m << "_ci";
    csv << '\n';
    for (auto seed : base.seeds) {
        auto s = base.settings;
        s.set("seed", std::to_string(seed));
        s.set("output", (dir / ("seed_" + std::to_string(seed))).string());
        const auto cfg = config::from_settings(s);
        auto rep = run_experiment(corpus, cfg);
        csv << seed << ',' << rep.runs.size();
        for (const auto& m : metric_names()) {
            const auto& ci = rep.aggregate.at(m);
            if (ci.n == 0) csv << ",,";
            else csv << ',' << detail::fixed(ci.mean) << ',' << detail::fixed(ci.half_width);
        }
        csv << '\n';
        reports.push_back(std::move(rep));
    }
    return reports;
}

} // namespace sentry::bench
