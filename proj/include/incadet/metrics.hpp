#pragma once

#include "incadet/graph.hpp"

#include <optional>
#include <string>
#include <vector>

namespace incadet {

struct Confusion {
    long tp = 0;
    long fp = 0;
    long tn = 0;
    long fn = 0;
};

Confusion confusion_counts(const std::vector<int>& predictions, const std::vector<int>& labels);

// Window-level F1; window labels already encode the any-point rule from
// segmentation. Absent when the labels contain no positives.
std::optional<double> point_adjusted_f1(const std::vector<int>& predictions,
                                        const std::vector<int>& labels);

struct AucResult {
    std::optional<double> roc;
    std::optional<double> prc;
};

struct CurvePoint {
    double x = 0.0;
    double y = 0.0;
};

// (FPR, TPR) points from (0,0) through every tied-score group; requires
// both classes present.
std::vector<CurvePoint> roc_curve(const std::vector<double>& scores,
                                  const std::vector<int>& labels);

// (recall, precision) points, one per tied-score group.
std::vector<CurvePoint> prc_curve(const std::vector<double>& scores,
                                  const std::vector<int>& labels);

// ROC by the trapezoidal rule with tied scores grouped; PRC by step-wise
// interpolation. Absent unless both classes are present.
AucResult roc_prc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

struct AlarmRates {
    std::optional<double> mar;  // FN / (TP + FN)
    std::optional<double> mae;  // FP / (TN + FP), false-alarm rate
};

AlarmRates mar_mae(const std::vector<int>& predictions, const std::vector<int>& labels);

// Edge edit distance: intra edges may be inserted, deleted, or reversed
// (reversal costs 1); lag edges carry a time direction, so only insertion
// and deletion apply there.
int structural_hamming(const CausalGraph& a, const CausalGraph& b);

struct MetricsReport {
    std::optional<double> f1;
    std::optional<double> roc_auc;
    std::optional<double> prc_auc;
    std::optional<double> mar;
    std::optional<double> mae;
    Confusion confusion;
    std::vector<double> scores;
    std::vector<int> predictions;
    std::vector<int> labels;

    std::string to_json(int indent = 2) const;
    // Accepts metrics JSON and pipeline report JSON (extra keys ignored).
    static MetricsReport from_json(const std::string& text);
};

MetricsReport compute_report(const std::vector<double>& scores,
                             const std::vector<int>& predictions,
                             const std::vector<int>& labels);

}  // namespace incadet
