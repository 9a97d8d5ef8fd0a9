#pragma once

#include "incadet/graph.hpp"
#include "incadet/histogram.hpp"

#include <optional>

namespace incadet {

// Similarity of two graphs' edge-weight distributions: 1 - JS divergence,
// so 1 means identical distributions.
double similarity(const CausalGraph& a, const CausalGraph& b, int bins, double weight_range);

struct TriggerDecision {
    bool fired = false;
    std::optional<double> similarity;  // absent on the very first window
};

// Watches consecutive per-window graphs and fires when their edge-weight
// distributions diverge (similarity drops below the threshold).
class TriggerState {
  public:
    TriggerState(double similarity_threshold, int bins, double weight_range);

    // Compares against the previously observed graph, then records this one.
    TriggerDecision check(const CausalGraph& graph, int window_index);

    // Re-arms after incremental learning converged: comparisons restart from
    // the given post-convergence graph.
    void reset(const CausalGraph& graph);

    double threshold() const { return threshold_; }
    const std::optional<CausalGraph>& last_graph() const { return last_graph_; }
    const std::optional<int>& fired_at() const { return fired_at_; }

  private:
    double threshold_;
    int bins_;
    double weight_range_;
    std::optional<CausalGraph> last_graph_;
    std::optional<int> fired_at_;
};

}  // namespace incadet
