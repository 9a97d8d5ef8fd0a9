#pragma once

#include "incadet/graph.hpp"

#include <Eigen/Dense>

#include <vector>

namespace incadet {

// Laplace-smoothed probability histogram over a fixed bin grid. Fixed edges
// keep consecutive histograms directly comparable.
struct Histogram {
    std::vector<double> bin_edges;   // B+1 ascending values
    Eigen::VectorXd probabilities;   // B entries, sum 1 after smoothing
    bool from_empty = false;         // no observations: smoothing-only uniform

    int bin_count() const { return static_cast<int>(probabilities.size()); }
    bool same_bins(const Histogram& other) const;
};

// Bins raw values (clamping out-of-range values into the end bins), then
// applies +1 smoothing: p_b = (count_b + 1) / (n + B).
Histogram value_histogram(const std::vector<double>& values, int bins, double lo, double hi);

// Bins the absolute weights of every nonzero edge (intra and lag blocks).
Histogram edge_weight_histogram(const CausalGraph& graph, int bins, double lo, double hi);

// Jensen-Shannon divergence with base-2 logs, bounded in [0,1].
double js_divergence(const Histogram& p, const Histogram& q);
double js_divergence(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

}  // namespace incadet
