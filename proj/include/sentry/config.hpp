#pragma once

// Flat key=value experiment configuration with command-line overrides.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sentry/error.hpp"
#include "sentry/kdd.hpp"

namespace sentry::config {

inline const std::vector<std::string>& detector_names() {
    static const std::vector<std::string> names = {"asch", "rbc", "ql", "sarsa", "td"};
    return names;
}

/// Every recognised key with its default value.
inline const std::map<std::string, std::string>& defaults() {
    static const std::map<std::string, std::string> d = {
        {"train", ""},
        {"test", ""},
        {"output", "sentry-out"},
        {"detector", "ql"},
        {"detectors", "asch,rbc,ql,sarsa,td"},
        {"nodes", "20"},
        {"clusters", "4"},
        {"slot_length", "100"},
        {"runs", "10"},
        {"seed", "1"},
        {"seeds", "1,2,3"},
        {"train_fraction", "0.1"},
        {"test_fraction", "0.1"},
        {"holdout_fraction", "0.3"},
        {"labels", "lenient"},
        {"skip_bad", "false"},
        {"sim_time", "600"},
        {"packet_size", "250"},
        {"forest.trees", "20"},
        {"forest.features", "0"},
        {"forest.max_depth", "32"},
        {"forest.min_leaf", "1"},
        {"dbscan.epsilon", "0"},
        {"dbscan.min_pts", "4"},
        {"dbscan.variance", "inf"},
        {"dbscan.sample", "2000"},
        {"asch.alpha", "0.7"},
        {"asch.init", "0.5"},
        {"asch.delta", "0.05"},
        {"asch.lo", "0.1"},
        {"asch.hi", "0.9"},
        {"asch.tune_fraction", "0.2"},
        {"asch.adaptive_eval", "false"},
        {"rbm.hidden", "24,16,8"},
        {"rbm.epochs", "15"},
        {"rbm.learning_rate", "0.05"},
        {"rbm.batch", "64"},
        {"rl.alpha", "0.1"},
        {"rl.gamma", "0.9"},
        {"rl.epsilon_start", "1.0"},
        {"rl.epsilon_decay", "0.995"},
        {"rl.epsilon_floor", "0.01"},
        {"rl.alpha_decay", "0"},
        {"rl.episodes", "100"},
        {"rl.features", "8"},
        {"rl.bins", "3"},
        {"synth.rows", "0"},
        {"synth.split", "train"},
    };
    return d;
}

/// Raw effective values, defaults overlaid by file entries and then flags.
class Settings {
public:
    Settings() : values_(defaults()) {}

    void set(const std::string& key, const std::string& value, const std::string& where = "flag") {
        if (!values_.contains(key)) throw ConfigError(where + ": unknown key '" + key + "'");
        values_[key] = value;
    }

    const std::string& get(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError("unknown key '" + key + "'");
        return it->second;
    }

    const std::map<std::string, std::string>& values() const { return values_; }

    nlohmann::json to_json() const { return nlohmann::json(values_); }

private:
    std::map<std::string, std::string> values_;
};

namespace detail {
inline std::string trim(std::string_view s) { return std::string(kdd::detail::trim(s)); }
} // namespace detail

/// Applies `key = value` lines; '#' starts a comment.
inline void read_config(std::istream& in, Settings& s, const std::string& source = "config") {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        const auto body = detail::trim(std::string_view(line).substr(0, hash));
        if (body.empty()) continue;
        const std::string where = source + " line " + std::to_string(lineno);
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected key = value, got '" + body + "'");
        const auto key = detail::trim(std::string_view(body).substr(0, eq));
        const auto value = detail::trim(std::string_view(body).substr(eq + 1));
        if (key.empty()) throw ConfigError(where + ": missing key in '" + body + "'");
        if (value.empty() || value.find('=') != std::string::npos)
            throw ConfigError(where + ": malformed value for key '" + key + "' in '" + body + "'");
        s.set(key, value, where);
    }
}

/// A missing file is not an error; flags alone may define the experiment.
inline void read_config_file(const std::string& path, Settings& s) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) return;
    read_config(in, s, path);
}

// ---------------------------------------------------------------------------
// Typed view

struct ForestBlock {
    std::size_t trees = 20, features = 0, max_depth = 32, min_leaf = 1;
};
struct DbscanBlock {
    double epsilon = 0.0; ///< 0 picks the k-distance elbow
    std::size_t min_pts = 4;
    double variance = 0.0;
    std::size_t sample = 2000;
};
struct AschBlock {
    double alpha = 0.7, init = 0.5, delta = 0.05, lo = 0.1, hi = 0.9, tune_fraction = 0.2;
    bool adaptive_eval = false;
};
struct RbmBlock {
    std::vector<std::size_t> hidden;
    std::size_t epochs = 15;
    double learning_rate = 0.05;
    std::size_t batch = 64;
};
struct RlBlock {
    double alpha = 0.1, gamma = 0.9, epsilon_start = 1.0, epsilon_decay = 0.995, epsilon_floor = 0.01,
           alpha_decay = 0.0;
    std::size_t episodes = 100, features = 8, bins = 3;
};

struct ExperimentConfig {
    std::string train, test, output;
    std::string detector;
    std::vector<std::string> detectors;
    std::size_t nodes = 20, clusters = 4, slot_length = 100, runs = 10;
    std::uint64_t seed = 1;
    std::vector<std::uint64_t> seeds;
    double train_fraction = 0.1, test_fraction = 0.1, holdout_fraction = 0.3;
    kdd::LabelMap::Mode labels = kdd::LabelMap::Mode::Lenient;
    bool skip_bad = false;
    double sim_time = 600, packet_size = 250;
    ForestBlock forest;
    DbscanBlock dbscan;
    AschBlock asch;
    RbmBlock rbm;
    RlBlock rl;
    std::size_t synth_rows = 0;
    std::string synth_split = "train";
    Settings settings; ///< raw effective values, echoed into reports
};

namespace detail {

inline std::string where(const std::string& key, const std::string& value) {
    return "key '" + key + "': invalid value '" + value + "'";
}

inline double as_double(const Settings& s, const std::string& key) {
    const auto& v = s.get(key);
    if (v == "inf") return std::numeric_limits<double>::infinity();
    double out = 0.0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size() || std::isnan(out))
        throw ConfigError(where(key, v) + " (expected a number)");
    return out;
}

inline std::uint64_t as_uint(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size())
        throw ConfigError(where(key, v) + " (expected a nonnegative integer)");
    return out;
}

inline std::uint64_t as_uint(const Settings& s, const std::string& key) { return as_uint(key, s.get(key)); }

inline std::size_t as_size(const Settings& s, const std::string& key) {
    return static_cast<std::size_t>(as_uint(s, key));
}

inline bool as_bool(const Settings& s, const std::string& key) {
    const auto& v = s.get(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(where(key, v) + " (expected true or false)");
}

inline std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
        if (auto t = trim(item); !t.empty()) out.push_back(t);
    return out;
}

inline void check_detector(const std::string& key, const std::string& name) {
    const auto& valid = detector_names();
    if (std::find(valid.begin(), valid.end(), name) == valid.end())
        throw ConfigError("key '" + key + "': unknown detector '" + name + "' (valid: asch, rbc, ql, sarsa, td)");
}

inline void require(bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw ConfigError("key '" + key + "': " + what);
}

} // namespace detail

inline ExperimentConfig from_settings(const Settings& s) {
    using namespace detail;
    ExperimentConfig c;
    c.settings = s;
    c.train = s.get("train");
    c.test = s.get("test");
    c.output = s.get("output");
    c.detector = s.get("detector");
    check_detector("detector", c.detector);
    c.detectors = split_list(s.get("detectors"));
    for (const auto& d : c.detectors) check_detector("detectors", d);
    c.nodes = as_size(s, "nodes");
    c.clusters = as_size(s, "clusters");
    c.slot_length = as_size(s, "slot_length");
    c.runs = as_size(s, "runs");
    c.seed = as_uint(s, "seed");
    for (const auto& v : split_list(s.get("seeds"))) c.seeds.push_back(as_uint("seeds", v));
    c.train_fraction = as_double(s, "train_fraction");
    c.test_fraction = as_double(s, "test_fraction");
    c.holdout_fraction = as_double(s, "holdout_fraction");
    const auto& labels = s.get("labels");
    if (labels == "strict") c.labels = kdd::LabelMap::Mode::Strict;
    else if (labels == "lenient") c.labels = kdd::LabelMap::Mode::Lenient;
    else throw ConfigError(where("labels", labels) + " (expected strict or lenient)");
    c.skip_bad = as_bool(s, "skip_bad");
    c.sim_time = as_double(s, "sim_time");
    c.packet_size = as_double(s, "packet_size");

    c.forest = {as_size(s, "forest.trees"), as_size(s, "forest.features"), as_size(s, "forest.max_depth"),
                as_size(s, "forest.min_leaf")};
    c.dbscan = {as_double(s, "dbscan.epsilon"), as_size(s, "dbscan.min_pts"), as_double(s, "dbscan.variance"),
                as_size(s, "dbscan.sample")};
    c.asch = {as_double(s, "asch.alpha"), as_double(s, "asch.init"), as_double(s, "asch.delta"),
              as_double(s, "asch.lo"), as_double(s, "asch.hi"), as_double(s, "asch.tune_fraction"),
              as_bool(s, "asch.adaptive_eval")};
    for (const auto& v : split_list(s.get("rbm.hidden"))) c.rbm.hidden.push_back(as_uint("rbm.hidden", v));
    c.rbm.epochs = as_size(s, "rbm.epochs");
    c.rbm.learning_rate = as_double(s, "rbm.learning_rate");
    c.rbm.batch = as_size(s, "rbm.batch");
    c.rl = {as_double(s, "rl.alpha"), as_double(s, "rl.gamma"), as_double(s, "rl.epsilon_start"),
            as_double(s, "rl.epsilon_decay"), as_double(s, "rl.epsilon_floor"), as_double(s, "rl.alpha_decay"),
            as_size(s, "rl.episodes"), as_size(s, "rl.features"), as_size(s, "rl.bins")};
    c.synth_rows = as_size(s, "synth.rows");
    c.synth_split = s.get("synth.split");

    require(c.runs >= 1, "runs", "must be >= 1");
    require(c.nodes >= 1, "nodes", "must be >= 1");
    require(c.clusters >= 1 && c.clusters <= c.nodes, "clusters", "must lie in [1, nodes]");
    require(c.slot_length >= 1, "slot_length", "must be >= 1");
    require(c.train_fraction > 0.0 && c.train_fraction <= 1.0, "train_fraction", "must lie in (0,1]");
    require(c.test_fraction > 0.0 && c.test_fraction <= 1.0, "test_fraction", "must lie in (0,1]");
    require(c.holdout_fraction > 0.0 && c.holdout_fraction < 1.0, "holdout_fraction", "must lie in (0,1)");
    require(c.forest.trees >= 1, "forest.trees", "must be >= 1");
    require(c.forest.max_depth >= 1, "forest.max_depth", "must be >= 1");
    require(c.forest.min_leaf >= 1, "forest.min_leaf", "must be >= 1");
    require(c.dbscan.epsilon >= 0.0, "dbscan.epsilon", "must be >= 0 (0 selects the k-distance elbow)");
    require(c.dbscan.min_pts >= 2, "dbscan.min_pts", "must be >= 2");
    require(c.dbscan.sample >= 2, "dbscan.sample", "must be >= 2");
    require(c.asch.alpha > 0.0 && c.asch.alpha < 1.0, "asch.alpha", "must lie in (0,1)");
    require(c.asch.init > 0.0, "asch.init", "must be positive");
    require(c.asch.delta >= 0.0, "asch.delta", "must be >= 0");
    require(0.0 <= c.asch.lo && c.asch.lo <= 0.5 && 0.5 <= c.asch.hi && c.asch.hi <= 1.0, "asch.lo",
            "clamps must satisfy 0 <= lo <= 0.5 <= hi <= 1");
    require(c.asch.tune_fraction > 0.0 && c.asch.tune_fraction < 1.0, "asch.tune_fraction", "must lie in (0,1)");
    require(!c.rbm.hidden.empty(), "rbm.hidden", "needs at least one layer");
    for (auto h : c.rbm.hidden) require(h >= 1, "rbm.hidden", "layer sizes must be >= 1");
    require(c.rbm.batch >= 1, "rbm.batch", "must be >= 1");
    require(c.rbm.learning_rate >= 0.0, "rbm.learning_rate", "must be >= 0");
    require(c.rl.alpha > 0.0 && c.rl.alpha < 1.0, "rl.alpha", "must lie in (0,1)");
    require(c.rl.gamma > 0.0 && c.rl.gamma < 1.0, "rl.gamma", "must lie in (0,1)");
    require(c.rl.epsilon_start >= 0.0 && c.rl.epsilon_start <= 1.0, "rl.epsilon_start", "must lie in [0,1]");
    require(c.rl.epsilon_decay > 0.0 && c.rl.epsilon_decay <= 1.0, "rl.epsilon_decay", "must lie in (0,1]");
    require(c.rl.epsilon_floor >= 0.0 && c.rl.epsilon_floor <= 1.0, "rl.epsilon_floor", "must lie in [0,1]");
    require(c.rl.alpha_decay >= 0.0, "rl.alpha_decay", "must be >= 0");
    require(c.rl.bins >= 1, "rl.bins", "must be >= 1");
    require(c.rl.features >= 1, "rl.features", "must be >= 1");
    require(c.synth_split == "train" || c.synth_split == "test", "synth.split", "must be train or test");
    return c;
}

/// Parses `--key value` and `--key=value` pairs.
inline void apply_flags(std::span<const std::string> args, Settings& s) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        const auto& a = args[i];
        if (a.rfind("--", 0) != 0) throw ConfigError("unexpected argument '" + a + "'");
        auto body = a.substr(2);
        const auto eq = body.find('=');
        if (eq != std::string::npos) {
            s.set(body.substr(0, eq), body.substr(eq + 1));
        } else {
            if (i + 1 >= args.size()) throw ConfigError("flag '--" + body + "' needs a value");
            s.set(body, args[++i]);
        }
    }
}

/// File first, then flags.
inline ExperimentConfig parse_config(const std::string& path, std::span<const std::string> flags = {}) {
    Settings s;
    read_config_file(path, s);
    apply_flags(flags, s);
    return from_settings(s);
}

} // namespace sentry::config
