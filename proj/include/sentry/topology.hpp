#pragma once

// Clustered sensor network: weighted cluster-head election, trust-scored
// aggregation and time-slotted delivery of record batches.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "sentry/error.hpp"
#include "sentry/kdd.hpp"

namespace sentry::wsn {

struct SensorNode {
    int id = 0;
    int degree = 0;
    double mobility = 0.0;
    double cumulative_time = 0.0;
    double rssi_sum = 1.0;
    double trust = 1.0;
    /// Position in the operational area; documentation only.
    double x = 0.0;
    double y = 0.0;
};

struct WeightCoefficients {
    double degree = 0.25;
    double rssi = 0.25;
    double mobility = 0.25;
    double time = 0.25;

    void validate() const {
        if (degree < 0 || rssi < 0 || mobility < 0 || time < 0)
            throw std::invalid_argument("weight coefficients must be nonnegative");
        if (std::abs(degree + rssi + mobility + time - 1.0) > 1e-9)
            throw std::invalid_argument("weight coefficients must sum to 1");
    }
};

/// Range of 1/rssi_sum over a node population, used to scale the signal term.
struct RssiRange {
    double lo = 0.0;
    double hi = 0.0;

    static RssiRange of(std::span<const SensorNode> nodes) {
        RssiRange r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
        for (const auto& n : nodes) {
            if (!(n.rssi_sum > 0.0))
                throw NonPositiveRssiError("node " + std::to_string(n.id) + " has rssi_sum <= 0");
            r.lo = std::min(r.lo, 1.0 / n.rssi_sum);
            r.hi = std::max(r.hi, 1.0 / n.rssi_sum);
        }
        return r;
    }

    double scale(double rssi_sum) const {
        const double span = hi - lo;
        return span > 0.0 ? (1.0 / rssi_sum - lo) / span : 0.0;
    }
};

/// G_n = g_d |D_n - capacity| + g_sum rho(n) + g_m M_n + g_h h_n, where rho
/// is the population-scaled reciprocal of the node's summed signal strength.
inline double node_weight(const SensorNode& n, int capacity, const WeightCoefficients& g,
                          const RssiRange& range) {
    if (!(n.rssi_sum > 0.0))
        throw NonPositiveRssiError("node " + std::to_string(n.id) + " has rssi_sum <= 0");
    if (capacity < 1) throw std::invalid_argument("cluster-head capacity must be >= 1");
    return g.degree * std::abs(n.degree - capacity) + g.rssi * range.scale(n.rssi_sum) +
           g.mobility * n.mobility + g.time * n.cumulative_time;
}

inline double node_weight(const SensorNode& n, int capacity, const WeightCoefficients& g) {
    return node_weight(n, capacity, g, RssiRange::of(std::span(&n, 1)));
}

inline std::vector<double> population_weights(std::span<const SensorNode> nodes, int capacity,
                                              const WeightCoefficients& g) {
    const auto range = RssiRange::of(nodes);
    std::vector<double> w;
    w.reserve(nodes.size());
    for (const auto& n : nodes) w.push_back(node_weight(n, capacity, g, range));
    return w;
}

struct Cluster {
    int head = 0;
    std::vector<int> members; ///< sorted, excludes the head
};

struct ClusterAssignment {
    std::vector<Cluster> clusters; ///< in election order

    std::size_t node_count() const {
        std::size_t n = 0;
        for (const auto& c : clusters) n += 1 + c.members.size();
        return n;
    }
};

inline int default_capacity(std::size_t nodes, std::size_t clusters) {
    return static_cast<int>((nodes + clusters - 1) / clusters);
}

/// Repeatedly elects the minimum-weight node (ties: lower id) among the
/// remaining nodes, re-scaling the signal term each round. Non-head nodes then
/// join the head nearest by id (ties: lower head id).
inline ClusterAssignment elect_cluster_heads(std::span<const SensorNode> nodes,
                                             std::size_t num_clusters,
                                             const WeightCoefficients& g, int capacity) {
    if (num_clusters == 0) throw std::invalid_argument("need at least one cluster");
    if (num_clusters > nodes.size())
        throw InsufficientNodesError("cannot elect " + std::to_string(num_clusters) +
                                     " heads from " + std::to_string(nodes.size()) + " nodes");
    g.validate();

    std::vector<SensorNode> remaining(nodes.begin(), nodes.end());
    std::vector<int> heads;
    for (std::size_t round = 0; round < num_clusters; ++round) {
        const auto w = population_weights(remaining, capacity, g);
        std::size_t best = 0;
        for (std::size_t i = 1; i < remaining.size(); ++i) {
            if (w[i] < w[best] || (w[i] == w[best] && remaining[i].id < remaining[best].id))
                best = i;
        }
        heads.push_back(remaining[best].id);
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
    }

    ClusterAssignment out;
    for (int h : heads) out.clusters.push_back(Cluster{h, {}});
    for (const auto& n : remaining) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < heads.size(); ++c) {
            const auto d = std::abs(n.id - heads[c]);
            const auto db = std::abs(n.id - heads[best]);
            if (d < db || (d == db && heads[c] < heads[best])) best = c;
        }
        out.clusters[best].members.push_back(n.id);
    }
    for (auto& c : out.clusters) std::sort(c.members.begin(), c.members.end());
    return out;
}

inline ClusterAssignment elect_cluster_heads(std::span<const SensorNode> nodes,
                                             std::size_t num_clusters,
                                             const WeightCoefficients& g = {}) {
    return elect_cluster_heads(nodes, num_clusters, g,
                               default_capacity(nodes.size(), num_clusters));
}

/// T_CH = sum (T_n + 1) T_CH^n / sum (T_n + 1).
inline double trust_aggregate(std::span<const double> member_trust,
                              std::span<const double> pairwise_trust) {
    if (member_trust.empty()) throw EmptyClusterError("no members to aggregate trust over");
    if (member_trust.size() != pairwise_trust.size())
        throw DimensionMismatchError("member and pairwise trust lists differ in length");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < member_trust.size(); ++i) {
        const double t = member_trust[i], p = pairwise_trust[i];
        if (t < 0.0 || t > 1.0 || p < 0.0 || p > 1.0)
            throw RangeError("trust values must lie in [0,1]");
        num += (t + 1.0) * p;
        den += t + 1.0;
    }
    return num / den;
}

/// Ranges used to synthesize node attributes.
struct NodeSynthesis {
    int degree_min = 1, degree_max = 10;
    double mobility_max = 2.0;      // m/s
    double time_max = 5.0;          // s
    double rssi_min = 1.0, rssi_max = 100.0;
    double trust_min = 0.5;
    double area = 100.0;            // m, square side
};

inline std::vector<SensorNode> synthesize_nodes(std::size_t count, std::uint64_t seed,
                                                const NodeSynthesis& s = {}) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> degree(s.degree_min, s.degree_max);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<SensorNode> nodes;
    nodes.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        SensorNode n;
        n.id = static_cast<int>(i);
        n.degree = degree(rng);
        n.mobility = s.mobility_max * unit(rng);
        n.cumulative_time = s.time_max * unit(rng);
        n.rssi_sum = s.rssi_min + (s.rssi_max - s.rssi_min) * unit(rng);
        n.trust = s.trust_min + (1.0 - s.trust_min) * unit(rng);
        n.x = s.area * unit(rng);
        n.y = s.area * unit(rng);
        nodes.push_back(n);
    }
    return nodes;
}

/// A cluster with its aggregated head trust.
struct Topology {
    std::vector<SensorNode> nodes;
    ClusterAssignment assignment;
    std::vector<double> head_trust;
};

/// Elects heads and scores each one. Pairwise head-member trust estimates are
/// drawn from the same seed; a head without members keeps its own trust.
inline Topology build_topology(std::size_t node_count, std::size_t clusters, std::uint64_t seed,
                               const WeightCoefficients& g = {}, int capacity = 0) {
    Topology t;
    t.nodes = synthesize_nodes(node_count, seed);
    if (capacity <= 0) capacity = default_capacity(node_count, clusters);
    t.assignment = elect_cluster_heads(t.nodes, clusters, g, capacity);
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> pair(0.6, 1.0);
    for (const auto& c : t.assignment.clusters) {
        if (c.members.empty()) {
            t.head_trust.push_back(t.nodes[static_cast<std::size_t>(c.head)].trust);
            continue;
        }
        std::vector<double> member, pairwise;
        for (int m : c.members) {
            member.push_back(t.nodes[static_cast<std::size_t>(m)].trust);
            pairwise.push_back(pair(rng));
        }
        t.head_trust.push_back(trust_aggregate(member, pairwise));
    }
    return t;
}

inline nlohmann::json to_json(const Topology& t) {
    nlohmann::json j;
    j["nodes"] = nlohmann::json::array();
    for (const auto& n : t.nodes) {
        j["nodes"].push_back({{"id", n.id}, {"degree", n.degree}, {"mobility", n.mobility},
                              {"cumulative_time", n.cumulative_time}, {"rssi_sum", n.rssi_sum},
                              {"trust", n.trust}, {"x", n.x}, {"y", n.y}});
    }
    j["clusters"] = nlohmann::json::array();
    for (std::size_t c = 0; c < t.assignment.clusters.size(); ++c) {
        const auto& cl = t.assignment.clusters[c];
        j["clusters"].push_back(
            {{"head", cl.head}, {"members", cl.members}, {"head_trust", t.head_trust[c]}});
    }
    return j;
}

// ---------------------------------------------------------------------------
// Slotted delivery

struct SlotBatch {
    std::size_t slot = 0;
    std::size_t cluster = 0;
    double head_trust = 1.0;
    std::size_t first_row = 0; ///< dataset index of the first record
    std::vector<std::size_t> rows;
};

/// Deals consecutive chunks of `slot_length` rows to clusters round-robin.
inline std::vector<SlotBatch> stream_slots(const kdd::Dataset& d, const Topology& topo,
                                           std::size_t slot_length) {
    if (slot_length == 0) throw std::invalid_argument("slot length must be >= 1");
    const auto clusters = std::max<std::size_t>(1, topo.assignment.clusters.size());
    std::vector<SlotBatch> out;
    for (std::size_t start = 0, slot = 0; start < d.size(); start += slot_length, ++slot) {
        SlotBatch b;
        b.slot = slot;
        b.cluster = slot % clusters;
        b.head_trust = topo.head_trust.empty() ? 1.0 : topo.head_trust[b.cluster];
        b.first_row = start;
        const auto end = std::min(d.size(), start + slot_length);
        for (auto i = start; i < end; ++i) b.rows.push_back(i);
        out.push_back(std::move(b));
    }
    return out;
}

} // namespace sentry::wsn
