#include "incadet/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace incadet {

bool Histogram::same_bins(const Histogram& other) const {
    return bin_edges == other.bin_edges;
}

Histogram value_histogram(const std::vector<double>& values, int bins, double lo, double hi) {
    if (bins < 2) throw std::invalid_argument("histogram needs at least 2 bins");
    if (!(lo < hi)) throw std::invalid_argument("histogram range must satisfy lo < hi");

    Histogram h;
    h.bin_edges.resize(static_cast<std::size_t>(bins) + 1);
    const double width = (hi - lo) / bins;
    for (int b = 0; b <= bins; ++b) h.bin_edges[static_cast<std::size_t>(b)] = lo + b * width;

    Eigen::VectorXd counts = Eigen::VectorXd::Zero(bins);
    for (const double v : values) {
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite value in histogram input");
        int b = static_cast<int>(std::floor((v - lo) / width));
        b = std::clamp(b, 0, bins - 1);
        counts[b] += 1.0;
    }

    const double n = static_cast<double>(values.size());
    h.probabilities = (counts.array() + 1.0) / (n + bins);
    h.from_empty = values.empty();
    return h;
}

Histogram edge_weight_histogram(const CausalGraph& graph, int bins, double lo, double hi) {
    std::vector<double> weights;
    for (const GraphEdge& e : graph.edges()) weights.push_back(std::abs(e.weight));
    return value_histogram(weights, bins, lo, hi);
}

double js_divergence(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
    if (p.size() != q.size()) throw std::invalid_argument("histogram bin mismatch");
    const Eigen::VectorXd m = 0.5 * (p + q);
    auto kl = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        double sum = 0.0;
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            if (a[i] > 0.0) sum += a[i] * std::log2(a[i] / b[i]);
        }
        return sum;
    };
    const double js = 0.5 * kl(p, m) + 0.5 * kl(q, m);
    return std::clamp(js, 0.0, 1.0);
}

double js_divergence(const Histogram& p, const Histogram& q) {
    if (!p.same_bins(q)) throw std::invalid_argument("histogram bin mismatch");
    return js_divergence(p.probabilities, q.probabilities);
}

}  // namespace incadet
