#pragma once

// Random forest misuse detector: bootstrap-sampled CART trees with Gini
// splits over a random feature subset per node, grown to full size.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "sentry/error.hpp"
#include "sentry/kdd.hpp"
#include "sentry/types.hpp"

namespace sentry::forest {

struct TreeNode {
    int feature = -1; ///< -1 marks a leaf
    double threshold = 0.0;
    int left = -1;    ///< x[feature] <= threshold
    int right = -1;
    Verdict label = Verdict::Intrusive;
};

class DecisionTree {
public:
    DecisionTree() = default;
    explicit DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

    Verdict predict(std::span<const double> x) const {
        std::size_t i = 0;
        while (nodes_[i].feature >= 0) {
            const auto& n = nodes_[i];
            i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left
                                                                                              : n.right);
        }
        return nodes_[i].label;
    }

    const std::vector<TreeNode>& nodes() const { return nodes_; }

    std::size_t depth() const { return depth_from(0); }

private:
    std::size_t depth_from(std::size_t i) const {
        const auto& n = nodes_[i];
        if (n.feature < 0) return 0;
        return 1 + std::max(depth_from(static_cast<std::size_t>(n.left)),
                            depth_from(static_cast<std::size_t>(n.right)));
    }

    std::vector<TreeNode> nodes_;
};

struct ForestParams {
    std::size_t trees = 20;
    /// Features drawn per split; 0 selects round(sqrt(dim)).
    std::size_t features_per_split = 0;
    std::size_t max_depth = 32;
    std::size_t min_leaf = 1;
    std::uint64_t seed = 1;
};

struct Forest {
    std::vector<DecisionTree> trees;
    std::size_t dim = 0;
    std::size_t features_per_split = 0;
    std::uint64_t seed = 0;
};

namespace detail {

inline double gini(std::size_t pos, std::size_t n) {
    if (n == 0) return 0.0;
    const double p = static_cast<double>(pos) / static_cast<double>(n);
    return 2.0 * p * (1.0 - p);
}

struct Split {
    int feature = -1;
    double threshold = 0.0;
    double impurity = 0.0;
};

class TreeBuilder {
public:
    TreeBuilder(const kdd::Dataset& d, std::size_t var, const ForestParams& p, std::mt19937_64& rng)
        : data_(d), var_(var), params_(p), rng_(rng), features_(d.dim()) {
        std::iota(features_.begin(), features_.end(), std::size_t{0});
    }

    DecisionTree build(std::vector<std::size_t> rows) {
        nodes_.clear();
        grow(rows, 0);
        return DecisionTree(std::move(nodes_));
    }

private:
    int grow(std::vector<std::size_t>& rows, std::size_t depth) {
        const auto id = static_cast<int>(nodes_.size());
        nodes_.emplace_back();
        std::size_t pos = 0;
        for (auto r : rows) pos += data_.truth(r) == Verdict::Intrusive;
        // Majority label; ties go to Intrusive.
        nodes_[static_cast<std::size_t>(id)].label =
            2 * pos >= rows.size() ? Verdict::Intrusive : Verdict::Normal;

        if (pos == 0 || pos == rows.size() || depth >= params_.max_depth ||
            rows.size() < 2 * params_.min_leaf)
            return id;

        const auto split = best_split(rows);
        if (split.feature < 0) return id;

        std::vector<std::size_t> left, right;
        for (auto r : rows) {
            (data_.x[r][static_cast<std::size_t>(split.feature)] <= split.threshold ? left : right)
                .push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();
        const int l = grow(left, depth + 1);
        const int r = grow(right, depth + 1);
        auto& node = nodes_[static_cast<std::size_t>(id)];
        node.feature = split.feature;
        node.threshold = split.threshold;
        node.left = l;
        node.right = r;
        return id;
    }

    // Draws features in random order until `var_` non-constant ones have been
    // scored, so an impure node always splits when any feature varies.
    Split best_split(const std::vector<std::size_t>& rows) {
        std::shuffle(features_.begin(), features_.end(), rng_);
        Split best;
        best.impurity = std::numeric_limits<double>::infinity();
        std::size_t scored = 0;
        const auto n = rows.size();
        std::size_t total_pos = 0;
        for (auto r : rows) total_pos += data_.truth(r) == Verdict::Intrusive;

        for (auto f : features_) {
            if (scored >= var_) break;
            column_.clear();
            for (auto r : rows)
                column_.emplace_back(data_.x[r][f], data_.truth(r) == Verdict::Intrusive);
            std::sort(column_.begin(), column_.end());
            if (column_.front().first == column_.back().first) continue;
            ++scored;

            std::size_t left_pos = 0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                left_pos += column_[i].second;
                if (column_[i].first == column_[i + 1].first) continue;
                const auto nl = i + 1, nr = n - nl;
                if (nl < params_.min_leaf || nr < params_.min_leaf) continue;
                const double imp = (static_cast<double>(nl) * gini(left_pos, nl) +
                                    static_cast<double>(nr) * gini(total_pos - left_pos, nr)) /
                                   static_cast<double>(n);
                if (imp < best.impurity) {
                    best.impurity = imp;
                    best.feature = static_cast<int>(f);
                    best.threshold = 0.5 * (column_[i].first + column_[i + 1].first);
                    // Guard against the midpoint rounding onto the upper value.
                    if (!(best.threshold < column_[i + 1].first)) best.threshold = column_[i].first;
                }
            }
        }
        return best;
    }

    const kdd::Dataset& data_;
    std::size_t var_;
    const ForestParams& params_;
    std::mt19937_64& rng_;
    std::vector<std::size_t> features_;
    std::vector<std::pair<double, bool>> column_;
    std::vector<TreeNode> nodes_;
};

} // namespace detail

inline Forest train_forest(const kdd::Dataset& train, const ForestParams& p) {
    if (train.empty()) throw EmptyTrainingSetError("random forest needs training rows");
    if (p.trees < 1) throw std::invalid_argument("forest needs at least one tree");
    const auto dim = train.dim();
    auto var = p.features_per_split;
    if (var == 0) var = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(std::sqrt(dim))));
    if (var > dim) throw std::invalid_argument("features per split exceeds feature count");

    Forest f;
    f.dim = dim;
    f.features_per_split = var;
    f.seed = p.seed;
    std::mt19937_64 rng(p.seed);
    std::uniform_int_distribution<std::size_t> pick(0, train.size() - 1);
    detail::TreeBuilder builder(train, var, p, rng);
    for (std::size_t t = 0; t < p.trees; ++t) {
        std::vector<std::size_t> sample(train.size());
        for (auto& s : sample) s = pick(rng);
        f.trees.push_back(builder.build(std::move(sample)));
    }
    return f;
}

struct ForestVote {
    Verdict verdict = Verdict::Intrusive;
    double vote_share = 0.0; ///< fraction of trees voting Intrusive
};

/// Majority vote; an exact tie is reported as Intrusive.
inline ForestVote forest_classify(const Forest& f, std::span<const double> x) {
    if (f.trees.empty()) throw UnfittedModelError("forest has no trees");
    if (x.size() != f.dim)
        throw DimensionMismatchError("forest expects " + std::to_string(f.dim) + " features, got " +
                                     std::to_string(x.size()));
    std::size_t intrusive = 0;
    for (const auto& t : f.trees) intrusive += t.predict(x) == Verdict::Intrusive;
    ForestVote v;
    v.vote_share = static_cast<double>(intrusive) / static_cast<double>(f.trees.size());
    v.verdict = 2 * intrusive >= f.trees.size() ? Verdict::Intrusive : Verdict::Normal;
    return v;
}

inline nlohmann::json to_json(const Forest& f) {
    nlohmann::json j{{"dim", f.dim}, {"features_per_split", f.features_per_split}, {"seed", f.seed}};
    j["trees"] = nlohmann::json::array();
    for (const auto& t : f.trees) {
        nlohmann::json nodes = nlohmann::json::array();
        for (const auto& n : t.nodes())
            nodes.push_back({n.feature, n.threshold, n.left, n.right, static_cast<int>(n.label)});
        j["trees"].push_back(std::move(nodes));
    }
    return j;
}

inline Forest forest_from_json(const nlohmann::json& j) {
    Forest f;
    f.dim = j.at("dim").get<std::size_t>();
    f.features_per_split = j.at("features_per_split").get<std::size_t>();
    f.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& t : j.at("trees")) {
        std::vector<TreeNode> nodes;
        for (const auto& n : t) {
            nodes.push_back(TreeNode{n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(),
                                     n.at(3).get<int>(), static_cast<Verdict>(n.at(4).get<int>())});
        }
        f.trees.emplace_back(std::move(nodes));
    }
    return f;
}

} // namespace sentry::forest
