#pragma once

#include "incadet/graph.hpp"
#include "incadet/replay.hpp"
#include "incadet/series.hpp"

#include <Eigen/Dense>

#include <optional>
#include <set>
#include <string>

namespace incadet {

struct LaplacianView {
    Eigen::MatrixXd degree;      // diagonal, non-negative
    Eigen::MatrixXd laplacian;   // D - A_sym, zero row sums
    Eigen::MatrixXd normalized;  // D^-1/2 L D^-1/2, eigenvalues in [0,2]
};

// Symmetrizes the intra-window weights via A_sym = (|W| + |W|^T)/2 before
// building the Laplacian; absolute values keep degrees non-negative when
// fitted weights are negative. Zero-degree nodes get zero normalization.
LaplacianView laplacian(const CausalGraph& graph);

// Keeps exactly the intra edges with BOTH endpoints in the prior set; lag
// blocks are dropped (attack knowledge is contemporaneous structure).
CausalGraph extract_attack_subgraph(const CausalGraph& graph, const PriorKnowledge& prior);

// Upserts every edge of the subgraph into the buffer.
void buffer_update(ReplayBuffer& buffer, const CausalGraph& subgraph);

// Applies reinforcement to a fresh window graph: buffered edges present in
// it take weight buffer_w * omega, absent ones are inserted at buffer_w;
// magnitudes are capped at weight_cap, signs preserved. Everything else
// keeps its window-fit weight.
struct ReinforcementResult {
    CausalGraph graph;
    int reinforced = 0;
    int inserted = 0;
};
ReinforcementResult causal_edge_reinforcement(const CausalGraph& next_graph,
                                              const ReplayBuffer& buffer, double omega,
                                              double weight_cap);

// Breaks every intra cycle by deleting its lowest-|weight| edge whose source
// is not protected; if a cycle is entirely protected-source, the lowest-
// |weight| edge goes anyway. Ties break on (source, target) node order.
struct CycleRemovalResult {
    CausalGraph graph;
    int removed = 0;
    int removed_protected = 0;
};
CycleRemovalResult remove_cycles_protected(const CausalGraph& graph,
                                           const std::set<std::string>& protected_nodes);

// Compares weighted out-degree distributions of two consecutive attack
// subgraphs; converged when the JS divergence drops below stop_threshold.
struct StoppingResult {
    double similarity = 0.0;  // 1 - divergence
    double divergence = 1.0;
    bool converged = false;
};
StoppingResult stopping_score(const CausalGraph& subgraph_prev, const CausalGraph& subgraph_next,
                              const PriorKnowledge& prior, int bins, double outdegree_range,
                              double stop_threshold);

enum class SystemStatus { normal, attack };

struct IncrementalConfig {
    double reinforcement = 2.0;  // omega
    double weight_cap = 2.0;
    double stop_threshold = 0.1;
    int histogram_bins = 20;
    double outdegree_range = 4.0;
    bool use_buffer = true;  // ablation: no storage, no reinsertion
    bool use_cer = true;     // ablation: buffer kept but never applied
};

struct StepDiagnostics {
    std::optional<double> divergence;  // absent on the first post-trigger step
    std::optional<double> similarity;
    bool converged = false;
    int reinforced_edges = 0;
    int inserted_edges = 0;
    int removed_cycle_edges = 0;
    int attack_edge_count = 0;
    int normal_edge_count = 0;
    int buffer_size = 0;
};

struct IncrementalState {
    CausalGraph attack_graph;
    CausalGraph normal_graph;
    ReplayBuffer buffer;
    bool converged = false;

    // Raw (pre-reinforcement) window subgraph from the previous step; the
    // stopping comparison runs on these so reinforcement growth cannot mask
    // convergence of the underlying structure.
    std::optional<CausalGraph> previous_subgraph;

    static IncrementalState initial(std::vector<std::string> node_ids, int lag_order,
                                    std::optional<std::size_t> buffer_capacity = std::nullopt);
};

// Seeds the attack graph from the window graph that fired the trigger. The
// buffer persists across episodes — that is the point of replay.
void begin_attack(IncrementalState& state, const CausalGraph& trigger_graph);

// One update with a freshly fitted window graph. Attack path: extract from
// the current attack graph -> buffer -> reinforcement -> protected cycle
// removal -> stopping comparison. Normal path: the window graph with all
// prior-incident edges zeroed becomes the normal graph.
StepDiagnostics incremental_step(IncrementalState& state, const CausalGraph& new_window_graph,
                                 const PriorKnowledge& prior, SystemStatus status,
                                 const IncrementalConfig& config);

}  // namespace incadet
