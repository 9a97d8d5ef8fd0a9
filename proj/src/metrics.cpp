#include "incadet/metrics.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace incadet {

namespace {

void check_binary(const std::vector<int>& values, const char* what) {
    for (const int v : values) {
        if (v != 0 && v != 1) throw std::invalid_argument(std::string(what) + " must be binary");
    }
}

}  // namespace

Confusion confusion_counts(const std::vector<int>& predictions, const std::vector<int>& labels) {
    if (predictions.size() != labels.size()) {
        throw std::invalid_argument("prediction/label length mismatch");
    }
    check_binary(predictions, "predictions");
    check_binary(labels, "labels");
    Confusion c;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == 1) {
            (predictions[i] == 1 ? c.tp : c.fn) += 1;
        } else {
            (predictions[i] == 1 ? c.fp : c.tn) += 1;
        }
    }
    return c;
}

std::optional<double> point_adjusted_f1(const std::vector<int>& predictions,
                                        const std::vector<int>& labels) {
    const Confusion c = confusion_counts(predictions, labels);
    if (c.tp + c.fn == 0) return std::nullopt;  // no positive ground truth
    if (c.tp == 0) return 0.0;
    const double precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    const double recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    return 2.0 * precision * recall / (precision + recall);
}

namespace {

// Walks tied-score groups in descending score order, reporting cumulative
// (tp, fp) after each group.
template <typename Visit>
bool walk_score_groups(const std::vector<double>& scores, const std::vector<int>& labels,
                       Visit&& visit) {
    if (scores.size() != labels.size()) throw std::invalid_argument("score/label length mismatch");
    check_binary(labels, "labels");

    long pos = 0;
    for (const int y : labels) pos += y;
    const long neg = static_cast<long>(labels.size()) - pos;
    if (pos == 0 || neg == 0) return false;

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    double tp = 0.0, fp = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            (labels[order[j]] == 1 ? tp : fp) += 1.0;
            ++j;
        }
        visit(tp, fp, static_cast<double>(pos), static_cast<double>(neg));
        i = j;
    }
    return true;
}

}  // namespace

std::vector<CurvePoint> roc_curve(const std::vector<double>& scores,
                                  const std::vector<int>& labels) {
    std::vector<CurvePoint> points{{0.0, 0.0}};
    const bool ok = walk_score_groups(scores, labels, [&](double tp, double fp, double p, double n) {
        points.push_back({fp / n, tp / p});
    });
    if (!ok) throw std::invalid_argument("roc curve needs both classes present");
    return points;
}

std::vector<CurvePoint> prc_curve(const std::vector<double>& scores,
                                  const std::vector<int>& labels) {
    std::vector<CurvePoint> points;
    const bool ok = walk_score_groups(scores, labels, [&](double tp, double fp, double p, double) {
        points.push_back({tp / p, tp / (tp + fp)});
    });
    if (!ok) throw std::invalid_argument("prc curve needs both classes present");
    return points;
}

AucResult roc_prc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    double roc = 0.0, prc = 0.0;
    double prev_tpr = 0.0, prev_fpr = 0.0, prev_recall = 0.0;
    const bool ok = walk_score_groups(scores, labels, [&](double tp, double fp, double p, double n) {
        const double tpr = tp / p;
        const double fpr = fp / n;
        roc += (fpr - prev_fpr) * 0.5 * (tpr + prev_tpr);  // ties form trapezoids
        prc += (tpr - prev_recall) * (tp / (tp + fp));     // step-wise, no interpolation
        prev_tpr = tpr;
        prev_fpr = fpr;
        prev_recall = tpr;
    });
    if (!ok) return {};
    return {roc, prc};
}

AlarmRates mar_mae(const std::vector<int>& predictions, const std::vector<int>& labels) {
    const Confusion c = confusion_counts(predictions, labels);
    AlarmRates rates;
    if (c.tp + c.fn > 0) rates.mar = static_cast<double>(c.fn) / static_cast<double>(c.tp + c.fn);
    if (c.tn + c.fp > 0) rates.mae = static_cast<double>(c.fp) / static_cast<double>(c.tn + c.fp);
    return rates;
}

int structural_hamming(const CausalGraph& a, const CausalGraph& b) {
    if (a.node_ids != b.node_ids) throw std::invalid_argument("graph node sets differ");
    const long m = a.node_count();
    int distance = 0;

    for (long i = 0; i < m; ++i) {
        for (long j = i + 1; j < m; ++j) {
            const bool fa = a.intra(i, j) != 0.0, ba = a.intra(j, i) != 0.0;
            const bool fb = b.intra(i, j) != 0.0, bb = b.intra(j, i) != 0.0;
            const int naive = static_cast<int>(fa != fb) + static_cast<int>(ba != bb);
            const bool reversal = (fa && !ba && !fb && bb) || (!fa && ba && fb && !bb);
            distance += reversal ? 1 : naive;
        }
    }

    const std::size_t max_lag = std::max(a.lags.size(), b.lags.size());
    const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t lag = 0; lag < max_lag; ++lag) {
        const Eigen::MatrixXd& la = lag < a.lags.size() ? a.lags[lag] : zero;
        const Eigen::MatrixXd& lb = lag < b.lags.size() ? b.lags[lag] : zero;
        for (long i = 0; i < m; ++i) {
            for (long j = 0; j < m; ++j) {
                if ((la(i, j) != 0.0) != (lb(i, j) != 0.0)) ++distance;
            }
        }
    }
    return distance;
}

MetricsReport compute_report(const std::vector<double>& scores,
                             const std::vector<int>& predictions,
                             const std::vector<int>& labels) {
    MetricsReport report;
    report.f1 = point_adjusted_f1(predictions, labels);
    const AucResult auc = roc_prc_auc(scores, labels);
    report.roc_auc = auc.roc;
    report.prc_auc = auc.prc;
    const AlarmRates rates = mar_mae(predictions, labels);
    report.mar = rates.mar;
    report.mae = rates.mae;
    report.confusion = confusion_counts(predictions, labels);
    report.scores = scores;
    report.predictions = predictions;
    report.labels = labels;
    return report;
}

std::string MetricsReport::to_json(int indent) const {
    nlohmann::json j;
    auto put = [&j](const char* key, const std::optional<double>& v) {
        j[key] = v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    };
    put("point_adjusted_f1", f1);
    put("roc_auc", roc_auc);
    put("prc_auc", prc_auc);
    put("mar", mar);
    put("mae", mae);
    j["confusion"] = {{"tp", confusion.tp}, {"fp", confusion.fp},
                      {"tn", confusion.tn}, {"fn", confusion.fn}};
    j["scores"] = scores;
    j["predictions"] = predictions;
    j["labels"] = labels;
    return j.dump(indent);
}

MetricsReport MetricsReport::from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    MetricsReport report;
    auto get = [&j](const char* key) -> std::optional<double> {
        if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
        return j.at(key).get<double>();
    };
    report.f1 = get("point_adjusted_f1");
    report.roc_auc = get("roc_auc");
    report.prc_auc = get("prc_auc");
    report.mar = get("mar");
    report.mae = get("mae");
    const auto& c = j.at("confusion");
    report.confusion = {c.at("tp").get<long>(), c.at("fp").get<long>(),
                        c.at("tn").get<long>(), c.at("fn").get<long>()};
    report.scores = j.at("scores").get<std::vector<double>>();
    report.predictions = j.at("predictions").get<std::vector<int>>();
    report.labels = j.at("labels").get<std::vector<int>>();
    return report;
}

}  // namespace incadet
