#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace incadet {

/// One weighted directed edge. lag == 0 means an intra-window edge; lag >= 1
/// means the source is the lagged copy of the node, lag steps in the past.
struct GraphEdge {
    int src = 0;
    int dst = 0;
    int lag = 0;
    double weight = 0.0;
};

/// Diagnostics kept from a structure-learning fit.
struct FitInfo {
    double acyclicity = 0.0;       // h(A_X) at the returned iterate
    int outer_iterations = 0;
    bool converged = true;
    int edges_removed_for_acyclicity = 0;  // post-threshold fallback removals
};

/// Weighted directed graph over M named variables plus lagged copies: an
/// M x M intra-window block and one M x M block per time lag. The thresholded
/// intra block is kept acyclic by construction.
struct CausalGraph {
    std::vector<std::string> node_ids;
    Eigen::MatrixXd intra;              // A_X, diagonal fixed to zero
    std::vector<Eigen::MatrixXd> lags;  // A_T blocks, lags 1..p
    double edge_threshold = 0.0;
    FitInfo fit_info;

    static CausalGraph empty(std::vector<std::string> node_ids, int lag_order);

    int node_count() const { return static_cast<int>(node_ids.size()); }
    int lag_order() const { return static_cast<int>(lags.size()); }

    /// All nonzero edges, intra block first and then lag blocks in order.
    std::vector<GraphEdge> edges() const;
    int edge_count() const;

    /// Zeroes every entry with |w| below the threshold and records it.
    void apply_threshold(double threshold);

    /// Node index lookup; throws on unknown names.
    int index_of(const std::string& node) const;

    bool same_nodes(const CausalGraph& other) const { return node_ids == other.node_ids; }

    /// Throws std::invalid_argument on shape mismatches, nonzero intra
    /// diagonal or non-finite weights.
    void validate() const;
};

/// True when the nonzero pattern of `adjacency` has no directed cycle.
bool is_acyclic(const Eigen::MatrixXd& adjacency);

/// Returns the node indices of one directed cycle in the nonzero pattern of
/// `adjacency` (ordered so consecutive nodes are edges and the last wraps to
/// the first), or an empty vector when the graph is acyclic. Deterministic
/// for a fixed adjacency: nodes and neighbours are scanned in index order.
std::vector<int> find_cycle(const Eigen::MatrixXd& adjacency);

/// JSON round trip (node ids, weighted edge list tagged with lags, threshold
/// and fit diagnostics).
std::string graph_to_json(const CausalGraph& graph);
CausalGraph graph_from_json(const std::string& text);

}  // namespace incadet
