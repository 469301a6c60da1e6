#pragma once

// Stacked restricted Boltzmann machines with a two-way logistic head.
//
// Each layer is a bipartite energy model
//     E(v, h) = -a.v - b.h - v' W h,
// trained greedily with one-step contrastive divergence. Real inputs in [0,1]
// are used directly as visible activation probabilities. After stacking, a
// logistic head is fitted on the top layer's activations to give
// P(Intrusive) and P(Normal).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "sentry/error.hpp"
#include "sentry/kdd.hpp"
#include "sentry/types.hpp"

namespace sentry::rbm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline double sigmoid(double z) {
    return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

struct RbmLayer {
    Matrix weights;      ///< visible x hidden
    Vector visible_bias;
    Vector hidden_bias;

    RbmLayer() = default;
    RbmLayer(std::size_t visible, std::size_t hidden)
        : weights(Matrix::Zero(static_cast<Eigen::Index>(visible), static_cast<Eigen::Index>(hidden))),
          visible_bias(Vector::Zero(static_cast<Eigen::Index>(visible))),
          hidden_bias(Vector::Zero(static_cast<Eigen::Index>(hidden))) {}

    std::size_t visible() const { return static_cast<std::size_t>(weights.rows()); }
    std::size_t hidden() const { return static_cast<std::size_t>(weights.cols()); }

    bool finite() const {
        return weights.allFinite() && visible_bias.allFinite() && hidden_bias.allFinite();
    }
};

inline double energy(const RbmLayer& layer, const Vector& v, const Vector& h) {
    if (static_cast<std::size_t>(v.size()) != layer.visible() ||
        static_cast<std::size_t>(h.size()) != layer.hidden())
        throw DimensionMismatchError("energy: configuration does not match layer shape");
    return -layer.visible_bias.dot(v) - layer.hidden_bias.dot(h) - v.dot(layer.weights * h);
}

/// P(h_y = 1 | v) = sigmoid(b_y + sum_x v_x W_xy).
inline Vector cond_h_given_v(const RbmLayer& layer, const Vector& v) {
    if (static_cast<std::size_t>(v.size()) != layer.visible())
        throw DimensionMismatchError("visible vector has " + std::to_string(v.size()) +
                                     " units, layer expects " + std::to_string(layer.visible()));
    Vector z = layer.weights.transpose() * v + layer.hidden_bias;
    return z.unaryExpr([](double t) { return sigmoid(t); });
}

/// P(v_x = 1 | h) = sigmoid(a_x + sum_y W_xy h_y).
inline Vector cond_v_given_h(const RbmLayer& layer, const Vector& h) {
    if (static_cast<std::size_t>(h.size()) != layer.hidden())
        throw DimensionMismatchError("hidden vector has " + std::to_string(h.size()) +
                                     " units, layer expects " + std::to_string(layer.hidden()));
    Vector z = layer.weights * h + layer.visible_bias;
    return z.unaryExpr([](double t) { return sigmoid(t); });
}

/// Bit pattern `bits` as a 0/1 vector of length n (bit i -> unit i).
inline Vector unpack_bits(std::uint64_t bits, std::size_t n) {
    Vector v(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) v[static_cast<Eigen::Index>(i)] = static_cast<double>((bits >> i) & 1U);
    return v;
}

/// Exact joint and marginals over every binary configuration of one layer.
struct JointDistribution {
    std::size_t visible = 0;
    std::size_t hidden = 0;
    double log_partition = 0.0;
    std::vector<double> joint;     ///< index v | (h << visible)
    std::vector<double> p_visible; ///< index v
    std::vector<double> p_hidden;  ///< index h

    double operator()(std::uint64_t v, std::uint64_t h) const {
        return joint[static_cast<std::size_t>(v | (h << visible))];
    }
};

inline constexpr std::size_t kMaxExhaustiveUnits = 20;

inline JointDistribution exhaustive_distribution(const RbmLayer& layer) {
    const auto X = layer.visible(), Y = layer.hidden();
    if (X + Y > kMaxExhaustiveUnits)
        throw TooLargeError("exhaustive enumeration limited to " +
                            std::to_string(kMaxExhaustiveUnits) + " units, layer has " +
                            std::to_string(X + Y));
    JointDistribution d;
    d.visible = X;
    d.hidden = Y;
    const std::uint64_t nv = 1ULL << X, nh = 1ULL << Y;
    d.joint.resize(static_cast<std::size_t>(nv * nh));

    std::vector<Vector> vs, hs;
    for (std::uint64_t v = 0; v < nv; ++v) vs.push_back(unpack_bits(v, X));
    for (std::uint64_t h = 0; h < nh; ++h) hs.push_back(unpack_bits(h, Y));

    double max_neg = -std::numeric_limits<double>::infinity();
    for (std::uint64_t h = 0; h < nh; ++h) {
        for (std::uint64_t v = 0; v < nv; ++v) {
            const double ne = -energy(layer, vs[v], hs[h]);
            d.joint[static_cast<std::size_t>(v | (h << X))] = ne;
            max_neg = std::max(max_neg, ne);
        }
    }
    double z = 0.0;
    for (double& ne : d.joint) {
        ne = std::exp(ne - max_neg);
        z += ne;
    }
    for (double& p : d.joint) p /= z;
    d.log_partition = max_neg + std::log(z);

    d.p_visible.assign(static_cast<std::size_t>(nv), 0.0);
    d.p_hidden.assign(static_cast<std::size_t>(nh), 0.0);
    for (std::uint64_t h = 0; h < nh; ++h) {
        for (std::uint64_t v = 0; v < nv; ++v) {
            const double p = d.joint[static_cast<std::size_t>(v | (h << X))];
            d.p_visible[static_cast<std::size_t>(v)] += p;
            d.p_hidden[static_cast<std::size_t>(h)] += p;
        }
    }
    return d;
}

// ---------------------------------------------------------------------------
// Training

struct CdParams {
    std::size_t hidden = 24;
    std::size_t epochs = 15;
    double learning_rate = 0.05;
    std::size_t batch = 64;
    std::uint64_t seed = 1;
};

/// Rows of `data` as a matrix (one sample per row).
inline Matrix to_matrix(std::span<const FeatureVector> data) {
    if (data.empty()) return Matrix(0, 0);
    Matrix m(static_cast<Eigen::Index>(data.size()), static_cast<Eigen::Index>(data.front().size()));
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data[i].size() != data.front().size()) throw DimensionMismatchError("ragged training data");
        for (std::size_t j = 0; j < data[i].size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = data[i][j];
    }
    return m;
}

/// CD-1 over shuffled mini-batches. `reconstruction_error`, when given,
/// receives the mean squared reconstruction error of every epoch.
inline RbmLayer cd1_train_layer(const Matrix& data, const CdParams& p,
                                std::vector<double>* reconstruction_error = nullptr) {
    if (data.rows() == 0) throw EmptyTrainingSetError("RBM layer needs training rows");
    if (p.hidden < 1) throw std::invalid_argument("hidden layer needs at least one unit");
    if (p.batch < 1) throw std::invalid_argument("mini-batch size must be >= 1");

    const auto X = static_cast<std::size_t>(data.cols());
    RbmLayer layer(X, p.hidden);
    std::mt19937_64 rng(p.seed);
    std::normal_distribution<double> init(0.0, 0.01);
    for (Eigen::Index i = 0; i < layer.weights.size(); ++i) layer.weights.data()[i] = init(rng);

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(data.rows()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});

    for (std::size_t epoch = 0; epoch < p.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double err = 0.0;
        for (std::size_t start = 0; start < order.size(); start += p.batch) {
            const auto end = std::min(order.size(), start + p.batch);
            const auto B = static_cast<Eigen::Index>(end - start);
            Matrix v0(B, data.cols());
            for (Eigen::Index r = 0; r < B; ++r) v0.row(r) = data.row(order[start + static_cast<std::size_t>(r)]);

            Matrix h0 = ((v0 * layer.weights).rowwise() + layer.hidden_bias.transpose())
                            .unaryExpr([](double t) { return sigmoid(t); });
            Matrix h0s = h0.unaryExpr([&](double q) { return unit(rng) < q ? 1.0 : 0.0; });
            Matrix v1 = ((h0s * layer.weights.transpose()).rowwise() + layer.visible_bias.transpose())
                            .unaryExpr([](double t) { return sigmoid(t); });
            Matrix h1 = ((v1 * layer.weights).rowwise() + layer.hidden_bias.transpose())
                            .unaryExpr([](double t) { return sigmoid(t); });

            const double step = p.learning_rate / static_cast<double>(B);
            layer.weights += step * (v0.transpose() * h0 - v1.transpose() * h1);
            layer.visible_bias += step * (v0 - v1).colwise().sum().transpose();
            layer.hidden_bias += step * (h0 - h1).colwise().sum().transpose();
            err += (v0 - v1).squaredNorm();
        }
        if (reconstruction_error)
            reconstruction_error->push_back(err / static_cast<double>(data.rows() * data.cols()));
    }
    return layer;
}

inline RbmLayer cd1_train_layer(std::span<const FeatureVector> data, const CdParams& p,
                                std::vector<double>* reconstruction_error = nullptr) {
    if (data.empty()) throw EmptyTrainingSetError("RBM layer needs training rows");
    return cd1_train_layer(to_matrix(data), p, reconstruction_error);
}

/// Hidden activation probabilities for every row of `data`.
inline Matrix propagate(const RbmLayer& layer, const Matrix& data) {
    return ((data * layer.weights).rowwise() + layer.hidden_bias.transpose())
        .unaryExpr([](double t) { return sigmoid(t); });
}

// ---------------------------------------------------------------------------
// Stack and head

/// Two-unit softmax head. Column 0 feeds O1 (Intrusive), column 1 O2 (Normal).
/// Inputs are standardized with `center`/`scale` first; empty means identity.
struct Head {
    Matrix weights; ///< top hidden x 2
    Eigen::Vector2d bias = Eigen::Vector2d::Zero();
    Vector center;
    Vector scale;

    Vector standardize(const Vector& f) const {
        if (center.size() == 0) return f;
        return (f - center).cwiseQuotient(scale);
    }
};

struct ClassProbabilities {
    double intrusive = 0.5;
    double normal = 0.5;
    Verdict verdict() const { return intrusive >= 0.5 ? Verdict::Intrusive : Verdict::Normal; }
};

inline ClassProbabilities head_probabilities(const Head& head, const Vector& features) {
    const Eigen::Vector2d logits = head.weights.transpose() * head.standardize(features) + head.bias;
    const double z = logits[0] - logits[1];
    return {sigmoid(z), sigmoid(-z)};
}

struct HeadParams {
    double ridge = 1e-3;
    std::size_t max_iterations = 50;
    double tolerance = 1e-10;
};

/// Ridge-regularized logistic regression on standardized features by
/// iteratively reweighted least squares. Label 1 means Intrusive.
inline Head fit_head(const Matrix& features, std::span<const Verdict> labels, const HeadParams& hp = {}) {
    const auto n = features.rows(), k = features.cols();
    if (n == 0) throw EmptyTrainingSetError("head needs training rows");
    if (static_cast<std::size_t>(n) != labels.size()) throw DimensionMismatchError("labels vs features");
    const Vector center = features.colwise().mean().transpose();
    Vector scale = ((features.rowwise() - center.transpose()).colwise().squaredNorm() / static_cast<double>(n))
                       .transpose()
                       .cwiseSqrt();
    for (Eigen::Index j = 0; j < k; ++j)
        if (!(scale[j] > 1e-12)) scale[j] = 1.0;
    Matrix design(n, k + 1);
    design.leftCols(k) = (features.rowwise() - center.transpose()).array().rowwise() / scale.transpose().array();
    design.col(k).setOnes();
    Vector y(n);
    for (Eigen::Index i = 0; i < n; ++i) y[i] = labels[static_cast<std::size_t>(i)] == Verdict::Intrusive ? 1.0 : 0.0;

    Vector w = Vector::Zero(k + 1);
    for (std::size_t it = 0; it < hp.max_iterations; ++it) {
        const Vector p = (design * w).unaryExpr([](double t) { return sigmoid(t); });
        const Vector s = p.cwiseProduct(Vector::Ones(n) - p);
        Matrix hessian = design.transpose() * s.asDiagonal() * design;
        hessian.diagonal().array() += hp.ridge;
        const Vector grad = design.transpose() * (y - p) - hp.ridge * w;
        const Vector step = hessian.ldlt().solve(grad);
        w += step;
        if (step.lpNorm<Eigen::Infinity>() < hp.tolerance) break;
    }
    Head head;
    head.weights = Matrix::Zero(k, 2);
    head.weights.col(0) = w.head(k);
    head.bias[0] = w[k];
    head.center = center;
    head.scale = scale;
    return head;
}

struct StackParams {
    std::vector<std::size_t> hidden{24, 16, 8};
    std::size_t epochs = 15;
    double learning_rate = 0.05;
    std::size_t batch = 64;
    std::uint64_t seed = 1;
    HeadParams head;
};

struct RbmStack {
    std::vector<RbmLayer> layers;
    Head head;

    std::size_t input_width() const { return layers.empty() ? 0 : layers.front().visible(); }

    void validate() const {
        if (layers.empty()) throw DimensionMismatchError("stack has no layers");
        for (std::size_t k = 0; k + 1 < layers.size(); ++k)
            if (layers[k].hidden() != layers[k + 1].visible())
                throw DimensionMismatchError("layer " + std::to_string(k) + " hidden width " +
                                             std::to_string(layers[k].hidden()) +
                                             " does not match layer " + std::to_string(k + 1) +
                                             " visible width " + std::to_string(layers[k + 1].visible()));
        if (static_cast<std::size_t>(head.weights.rows()) != layers.back().hidden() || head.weights.cols() != 2)
            throw DimensionMismatchError("head shape does not match top layer");
        if (head.center.size() != head.scale.size() ||
            (head.center.size() != 0 && head.center.size() != head.weights.rows()))
            throw DimensionMismatchError("head standardization does not match top layer");
    }
};

/// Greedy layerwise training, then a supervised head on top-layer activations.
inline RbmStack train_stack(const kdd::Dataset& train, const StackParams& p,
                            std::vector<std::vector<double>>* reconstruction_error = nullptr) {
    if (p.hidden.empty()) throw std::invalid_argument("stack needs at least one hidden layer");
    if (train.empty()) throw EmptyTrainingSetError("RBM stack needs training rows");
    RbmStack stack;
    Matrix data = to_matrix(train.x);
    for (std::size_t k = 0; k < p.hidden.size(); ++k) {
        CdParams cd{p.hidden[k], p.epochs, p.learning_rate, p.batch, p.seed + 7919 * k};
        std::vector<double> log;
        stack.layers.push_back(cd1_train_layer(data, cd, &log));
        if (reconstruction_error) reconstruction_error->push_back(std::move(log));
        data = propagate(stack.layers.back(), data);
    }
    std::vector<Verdict> labels(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) labels[i] = train.truth(i);
    stack.head = fit_head(data, labels, p.head);
    return stack;
}

inline Vector top_features(const RbmStack& stack, std::span<const double> v) {
    if (v.size() != stack.input_width())
        throw DimensionMismatchError("stack expects " + std::to_string(stack.input_width()) +
                                     " inputs, got " + std::to_string(v.size()));
    Vector a = Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
    for (const auto& layer : stack.layers) a = cond_h_given_v(layer, a);
    return a;
}

inline ClassProbabilities classify(const RbmStack& stack, std::span<const double> v) {
    return head_probabilities(stack.head, top_features(stack, v));
}

// ---------------------------------------------------------------------------
// Serialization

inline constexpr int kFormatVersion = 1;

inline nlohmann::json to_json(const RbmStack& s) {
    auto flat = [](const Matrix& m) {
        std::vector<double> out;
        out.reserve(static_cast<std::size_t>(m.size()));
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
        return out;
    };
    auto vec = [](const auto& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
    nlohmann::json j{{"format", "sentry-rbm-stack"}, {"version", kFormatVersion}};
    j["layers"] = nlohmann::json::array();
    for (const auto& l : s.layers) {
        j["layers"].push_back({{"visible", l.visible()},
                               {"hidden", l.hidden()},
                               {"weights", flat(l.weights)},
                               {"visible_bias", vec(l.visible_bias)},
                               {"hidden_bias", vec(l.hidden_bias)}});
    }
    j["head"] = {{"inputs", s.head.weights.rows()}, {"weights", flat(s.head.weights)},
                 {"bias", vec(s.head.bias)}, {"center", vec(s.head.center)}, {"scale", vec(s.head.scale)}};
    return j;
}

inline RbmStack stack_from_json(const nlohmann::json& j) {
    if (j.value("format", std::string{}) != "sentry-rbm-stack")
        throw DataError("not a serialized RBM stack");
    if (j.at("version").get<int>() != kFormatVersion)
        throw DataError("unsupported RBM stack version " + j.at("version").dump());
    auto matrix = [](const nlohmann::json& a, std::size_t rows, std::size_t cols) {
        const auto flat = a.get<std::vector<double>>();
        if (flat.size() != rows * cols) throw DimensionMismatchError("weight matrix size mismatch");
        Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c)
                m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = flat[r * cols + c];
        return m;
    };
    auto vector = [](const nlohmann::json& a, std::size_t n) {
        const auto v = a.get<std::vector<double>>();
        if (v.size() != n) throw DimensionMismatchError("bias length mismatch");
        return Vector(Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(n)));
    };
    RbmStack s;
    for (const auto& l : j.at("layers")) {
        const auto X = l.at("visible").get<std::size_t>(), Y = l.at("hidden").get<std::size_t>();
        RbmLayer layer;
        layer.weights = matrix(l.at("weights"), X, Y);
        layer.visible_bias = vector(l.at("visible_bias"), X);
        layer.hidden_bias = vector(l.at("hidden_bias"), Y);
        s.layers.push_back(std::move(layer));
    }
    const auto& h = j.at("head");
    const auto inputs = h.at("inputs").get<std::size_t>();
    s.head.weights = matrix(h.at("weights"), inputs, 2);
    const auto b = h.at("bias").get<std::vector<double>>();
    if (b.size() != 2) throw DimensionMismatchError("head bias must have 2 entries");
    s.head.bias = {b[0], b[1]};
    if (h.contains("center") && !h.at("center").empty()) {
        s.head.center = vector(h.at("center"), inputs);
        s.head.scale = vector(h.at("scale"), inputs);
    }
    s.validate();
    return s;
}

} // namespace sentry::rbm
