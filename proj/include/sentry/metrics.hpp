#pragma once

// Confusion accounting and evaluation metrics: accuracy, detection rate,
// false-negative rate, precision/recall/F1, ROC curves and AUC.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "sentry/error.hpp"
#include "sentry/types.hpp"

namespace sentry::metrics {

struct ConfusionCounts {
    std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;

    std::uint64_t total() const { return tp + fp + tn + fn; }

    ConfusionCounts& operator+=(const ConfusionCounts& o) {
        tp += o.tp;
        fp += o.fp;
        tn += o.tn;
        fn += o.fn;
        return *this;
    }
    friend ConfusionCounts operator+(ConfusionCounts a, const ConfusionCounts& b) { return a += b; }
    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

inline ConfusionCounts accumulate(ConfusionCounts c, Verdict verdict, Verdict truth) {
    if (verdict == Verdict::Intrusive)
        ++(truth == Verdict::Intrusive ? c.tp : c.fp);
    else
        ++(truth == Verdict::Intrusive ? c.fn : c.tn);
    return c;
}

namespace detail {
inline double ratio(std::uint64_t num, std::uint64_t den) {
    return static_cast<double>(num) / static_cast<double>(den);
}
} // namespace detail

/// (TP + TN) / total.
inline double accuracy_rate(const ConfusionCounts& c) {
    if (c.total() == 0) throw EmptyCountsError("accuracy of an empty confusion matrix");
    return detail::ratio(c.tp + c.tn, c.total());
}

/// TP / (TP + FP), the detection rate as printed in the evaluation formula
/// (numerically the precision; recall is reported separately).
inline double detection_rate(const ConfusionCounts& c) {
    if (c.tp + c.fp == 0) throw NoPositiveVerdictsError("detection rate needs at least one Intrusive verdict");
    return detail::ratio(c.tp, c.tp + c.fp);
}

/// FN / total.
inline double false_negative_rate(const ConfusionCounts& c) {
    if (c.total() == 0) throw EmptyCountsError("FNR of an empty confusion matrix");
    return detail::ratio(c.fn, c.total());
}

struct PrecisionRecall {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

inline PrecisionRecall precision_recall_f1(const ConfusionCounts& c) {
    if (c.tp + c.fp == 0) throw UndefinedMetricError("precision undefined without Intrusive verdicts");
    if (c.tp + c.fn == 0) throw UndefinedMetricError("recall undefined without Intrusive truth");
    PrecisionRecall out;
    out.precision = detail::ratio(c.tp, c.tp + c.fp);
    out.recall = detail::ratio(c.tp, c.tp + c.fn);
    const double sum = out.precision + out.recall;
    out.f1 = sum > 0.0 ? 2.0 * out.precision * out.recall / sum : 0.0;
    return out;
}

// ---------------------------------------------------------------------------
// ROC

struct Scored {
    double score = 0.0; ///< larger means more likely intrusive
    Verdict truth = Verdict::Normal;
};

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

struct RocCurve {
    std::vector<RocPoint> points; ///< from (0,0) to (1,1), thresholds descending
    double auc = 0.0;
};

/// Sweeps thresholds over the distinct scores in descending order; equal
/// scores move together as one step. AUC by the trapezoid rule, accumulated
/// in integer counts so it matches pairwise counting exactly.
inline RocCurve roc_curve(std::span<const Scored> scored) {
    std::uint64_t pos = 0, neg = 0;
    for (const auto& s : scored) (s.truth == Verdict::Intrusive ? pos : neg) += 1;
    if (pos == 0 || neg == 0) throw SingleClassError("ROC needs both Normal and Intrusive truth");

    std::vector<Scored> sorted(scored.begin(), scored.end());
    std::sort(sorted.begin(), sorted.end(), [](const Scored& a, const Scored& b) { return a.score > b.score; });

    RocCurve roc;
    roc.points.push_back({0.0, 0.0});
    std::uint64_t tp = 0, fp = 0;
    long double twice_area = 0.0L; // sum dFP * (TP_prev + TP_cur)
    for (std::size_t i = 0; i < sorted.size();) {
        const double threshold = sorted[i].score;
        const auto tp0 = tp, fp0 = fp;
        for (; i < sorted.size() && sorted[i].score == threshold; ++i)
            (sorted[i].truth == Verdict::Intrusive ? tp : fp) += 1;
        twice_area += static_cast<long double>(fp - fp0) * static_cast<long double>(tp + tp0);
        roc.points.push_back({detail::ratio(fp, neg), detail::ratio(tp, pos)});
    }
    roc.auc = static_cast<double>(twice_area / (2.0L * static_cast<long double>(pos) * static_cast<long double>(neg)));
    return roc;
}

inline void write_roc_csv(std::ostream& out, const RocCurve& roc) {
    out << "fpr,tpr\n";
    for (const auto& p : roc.points) out << p.fpr << ',' << p.tpr << '\n';
}

// ---------------------------------------------------------------------------
// Reports

struct Report {
    ConfusionCounts counts;
    double ar = 0.0;
    std::optional<double> dr;
    double fnr = 0.0;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
    std::optional<double> auc;
};

/// Every metric defined for the counts; undefined ones stay empty.
inline Report make_report(const ConfusionCounts& c, std::optional<double> auc = std::nullopt) {
    Report r;
    r.counts = c;
    r.ar = accuracy_rate(c);
    r.fnr = false_negative_rate(c);
    if (c.tp + c.fp > 0) {
        r.dr = detection_rate(c);
        r.precision = r.dr;
    }
    if (c.tp + c.fn > 0) r.recall = detail::ratio(c.tp, c.tp + c.fn);
    if (r.precision && r.recall) r.f1 = precision_recall_f1(c).f1;
    r.auc = auc;
    return r;
}

inline nlohmann::json optional_json(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

inline nlohmann::json to_json(const Report& r) {
    return {{"ar", r.ar},
            {"dr", optional_json(r.dr)},
            {"fnr", r.fnr},
            {"precision", optional_json(r.precision)},
            {"recall", optional_json(r.recall)},
            {"f1", optional_json(r.f1)},
            {"auc", optional_json(r.auc)},
            {"counts", {{"tp", r.counts.tp}, {"fp", r.counts.fp}, {"tn", r.counts.tn}, {"fn", r.counts.fn}}}};
}

/// Mean and normal-approximation 95% half-width (1.96 standard errors).
struct MeanCi {
    double mean = 0.0;
    double half_width = 0.0;
    std::size_t n = 0;
};

inline MeanCi mean_ci(std::span<const double> values) {
    MeanCi out;
    out.n = values.size();
    if (values.empty()) return out;
    if (std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); })) {
        out.mean = values.front();
        return out;
    }
    double sum = 0.0;
    for (double v : values) sum += v;
    out.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - out.mean) * (v - out.mean);
        const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
        out.half_width = 1.96 * sd / std::sqrt(static_cast<double>(values.size()));
    }
    return out;
}

} // namespace sentry::metrics
