#include "incadet/trigger.hpp"

#include <stdexcept>

namespace incadet {

double similarity(const CausalGraph& a, const CausalGraph& b, int bins, double weight_range) {
    if (!a.same_nodes(b)) throw std::invalid_argument("similarity requires graphs over the same nodes");
    const Histogram ha = edge_weight_histogram(a, bins, 0.0, weight_range);
    const Histogram hb = edge_weight_histogram(b, bins, 0.0, weight_range);
    return 1.0 - js_divergence(ha, hb);
}

TriggerState::TriggerState(double similarity_threshold, int bins, double weight_range)
    : threshold_(similarity_threshold), bins_(bins), weight_range_(weight_range) {
    if (similarity_threshold <= 0.0 || similarity_threshold >= 1.0) {
        throw std::invalid_argument("similarity threshold must lie in (0,1)");
    }
}

TriggerDecision TriggerState::check(const CausalGraph& graph, int window_index) {
    TriggerDecision decision;
    if (last_graph_) {
        const double s = similarity(*last_graph_, graph, bins_, weight_range_);
        decision.similarity = s;
        decision.fired = s < threshold_;
    }
    if (decision.fired) {
        fired_at_ = window_index;
    } else {
        last_graph_ = graph;
    }
    return decision;
}

void TriggerState::reset(const CausalGraph& graph) {
    last_graph_ = graph;
    fired_at_.reset();
}

}  // namespace incadet
