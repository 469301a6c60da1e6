#pragma once

// E-DBSCAN anomaly detector. Plain DBSCAN core/border/noise labeling with one
// refinement: a candidate core whose eps-neighborhood shows a high variance in
// local density (neighbor counts) is demoted, so clusters do not bleed across
// density changes.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "sentry/error.hpp"
#include "sentry/types.hpp"

namespace sentry::edbscan {

enum class PointKind { Core, Border, Noise };

struct Params {
    double epsilon = 0.1;
    /// Minimum eps-neighborhood size of a core object, counting the point itself.
    std::size_t min_pts = 4;
    /// Upper bound on var/mean^2 of neighbor counts inside a core's
    /// neighborhood. Infinity disables the refinement.
    double variance_threshold = std::numeric_limits<double>::infinity();
};

struct Model {
    Params params;
    std::vector<FeatureVector> points;
    std::vector<PointKind> kind;
    std::vector<int> cluster; ///< -1 for noise
    std::vector<std::size_t> cores;
    std::size_t cluster_count = 0;
    bool fitted = false;

    std::size_t dim() const { return points.empty() ? 0 : points.front().size(); }
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline double distance(std::span<const double> a, std::span<const double> b) {
    return std::sqrt(squared_distance(a, b));
}

/// var/mean^2 of the neighbor counts of every point in `neighborhood`.
inline double density_variance(std::span<const std::size_t> neighborhood,
                               std::span<const std::size_t> counts) {
    double mean = 0.0;
    for (auto q : neighborhood) mean += static_cast<double>(counts[q]);
    mean /= static_cast<double>(neighborhood.size());
    double var = 0.0;
    for (auto q : neighborhood) {
        const double d = static_cast<double>(counts[q]) - mean;
        var += d * d;
    }
    var /= static_cast<double>(neighborhood.size());
    return var / (mean * mean);
}

inline Model edbscan_fit(std::span<const FeatureVector> points, const Params& p) {
    if (!(p.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    if (p.min_pts < 2) throw std::invalid_argument("min_pts must be >= 2");
    const auto n = points.size();
    for (const auto& v : points)
        if (v.size() != points.front().size()) throw DimensionMismatchError("ragged point set");

    Model m;
    m.params = p;
    m.points.assign(points.begin(), points.end());
    m.kind.assign(n, PointKind::Noise);
    m.cluster.assign(n, -1);
    m.fitted = true;

    const double eps2 = p.epsilon * p.epsilon;
    std::vector<std::vector<std::size_t>> nbrs(n);
    for (std::size_t i = 0; i < n; ++i) {
        nbrs[i].push_back(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            if (squared_distance(points[i], points[j]) <= eps2) {
                nbrs[i].push_back(j);
                nbrs[j].push_back(i);
            }
        }
    }
    std::vector<std::size_t> counts(n);
    for (std::size_t i = 0; i < n; ++i) counts[i] = nbrs[i].size();

    std::vector<char> core(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (counts[i] < p.min_pts) continue;
        if (std::isfinite(p.variance_threshold) &&
            density_variance(nbrs[i], counts) > p.variance_threshold)
            continue;
        core[i] = 1;
        m.cores.push_back(i);
    }

    // Connected components of the core graph, seeded in index order.
    int label = 0;
    std::queue<std::size_t> frontier;
    for (auto seed : m.cores) {
        if (m.cluster[seed] >= 0) continue;
        m.cluster[seed] = label;
        frontier.push(seed);
        while (!frontier.empty()) {
            const auto c = frontier.front();
            frontier.pop();
            for (auto q : nbrs[c]) {
                if (core[q] && m.cluster[q] < 0) {
                    m.cluster[q] = label;
                    frontier.push(q);
                }
            }
        }
        ++label;
    }
    m.cluster_count = static_cast<std::size_t>(label);

    // Border points join the cluster of their nearest core neighbor.
    for (std::size_t i = 0; i < n; ++i) {
        if (core[i]) {
            m.kind[i] = PointKind::Core;
            continue;
        }
        double best = std::numeric_limits<double>::infinity();
        for (auto q : nbrs[i]) {
            if (!core[q]) continue;
            const double d = squared_distance(points[i], points[q]);
            if (d < best) {
                best = d;
                m.cluster[i] = m.cluster[q];
            }
        }
        m.kind[i] = m.cluster[i] >= 0 ? PointKind::Border : PointKind::Noise;
    }
    return m;
}

/// Distance from x to the nearest core object (infinity without cores).
inline double core_distance(const Model& m, std::span<const double> x) {
    if (!m.fitted)
        throw UnfittedModelError("E-DBSCAN model has not been fitted");
    if (x.size() != m.dim()) throw DimensionMismatchError("query width differs from model width");
    double best = std::numeric_limits<double>::infinity();
    for (auto c : m.cores) best = std::min(best, squared_distance(m.points[c], x));
    return std::sqrt(best);
}

/// Intrusive iff x lies farther than epsilon from every core object.
inline Verdict anomaly_classify(const Model& m, std::span<const double> x) {
    return core_distance(m, x) <= m.params.epsilon ? Verdict::Normal : Verdict::Intrusive;
}

/// Anomaly score in [0,1): d/(d + eps), so the decision boundary sits at 0.5.
inline double anomaly_score(const Model& m, std::span<const double> x) {
    const double d = core_distance(m, x);
    if (!std::isfinite(d)) return 1.0;
    return d / (d + m.params.epsilon);
}

/// Epsilon at the elbow of the sorted k-distance curve (k = min_pts - 1
/// neighbors besides the point itself).
inline double suggest_epsilon(std::span<const FeatureVector> points, std::size_t min_pts) {
    const auto n = points.size();
    if (n < 2) return 1.0;
    const auto k = std::min<std::size_t>(std::max<std::size_t>(1, min_pts - 1), n - 1);
    std::vector<double> kdist(n);
    std::vector<double> row(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t w = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) row[w++] = squared_distance(points[i], points[j]);
        std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(k - 1), row.begin() + static_cast<std::ptrdiff_t>(w));
        kdist[i] = std::sqrt(row[k - 1]);
    }
    std::sort(kdist.begin(), kdist.end());
    const double lo = kdist.front(), hi = kdist.back();
    double eps = hi;
    if (hi > lo) {
        // Point of maximum distance below the chord of the normalized curve.
        double best = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) / static_cast<double>(n - 1);
            const double y = (kdist[i] - lo) / (hi - lo);
            if (t - y > best) {
                best = t - y;
                eps = kdist[i];
            }
        }
    }
    if (!(eps > 0.0)) {
        for (double d : kdist)
            if (d > 0.0) return d;
        return 1e-6;
    }
    return eps;
}

inline nlohmann::json to_json(const Model& m) {
    nlohmann::json cores = nlohmann::json::array();
    for (auto c : m.cores) cores.push_back(m.points[c]);
    return {{"epsilon", m.params.epsilon},
            {"min_pts", m.params.min_pts},
            {"variance_threshold", std::isfinite(m.params.variance_threshold)
                                       ? nlohmann::json(m.params.variance_threshold)
                                       : nlohmann::json(nullptr)},
            {"cluster_count", m.cluster_count},
            {"cores", std::move(cores)}};
}

/// Restores a classification-only model holding the core objects.
inline Model model_from_json(const nlohmann::json& j) {
    Model m;
    m.fitted = true;
    m.params.epsilon = j.at("epsilon").get<double>();
    m.params.min_pts = j.at("min_pts").get<std::size_t>();
    if (!j.at("variance_threshold").is_null())
        m.params.variance_threshold = j.at("variance_threshold").get<double>();
    m.cluster_count = j.at("cluster_count").get<std::size_t>();
    for (const auto& c : j.at("cores")) {
        m.cores.push_back(m.points.size());
        m.points.push_back(c.get<FeatureVector>());
        m.kind.push_back(PointKind::Core);
        m.cluster.push_back(0);
    }
    return m;
}

} // namespace sentry::edbscan
