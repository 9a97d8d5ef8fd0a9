#pragma once

#include "incadet/graph.hpp"
#include "incadet/incremental.hpp"
#include "incadet/series.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace incadet {

struct GraphSample {
    Eigen::MatrixXd aggregation;  // M x M smoothing operator, I - L_norm
    Eigen::MatrixXd features;     // M x F node features
    int label = 0;
};

// Node features: [weighted in-degree, weighted out-degree, prior-membership
// indicator], degrees over absolute weights of all blocks. F = 3.
GraphSample featurize(const CausalGraph& graph, const PriorKnowledge& prior);

// Three ReLU graph-convolution layers feeding a mean-pool sigmoid readout.
struct GcnModel {
    std::vector<Eigen::MatrixXd> layer_weights;  // F->h, h->h, h->h
    Eigen::VectorXd readout_weights;             // h
    double dropout_rate = 0.0;

    int feature_dim() const { return static_cast<int>(layer_weights.front().rows()); }
    int hidden_width() const { return static_cast<int>(layer_weights.front().cols()); }

    static GcnModel init(int features, int hidden, double dropout, unsigned int seed);

    std::string to_json() const;
    static GcnModel from_json(const std::string& text);
};

struct TrainConfig {
    double learning_rate = 0.01;
    int epochs = 300;
    unsigned int seed = 42;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    int hidden_width = 16;
    double dropout = 0.2;
};

// Inference-mode forward pass (no dropout); returns p in (0,1).
double forward(const GcnModel& model, const GraphSample& sample);

// Binary cross-entropy with p clamped to [1e-7, 1 - 1e-7].
double bce_loss(double p, int label);

struct Gradients {
    std::vector<Eigen::MatrixXd> layer;  // same shapes as layer_weights
    Eigen::VectorXd readout;
    // Smallest |pre-activation| across the ReLU layers; finite-difference
    // checks are only meaningful away from the kinks.
    double min_abs_preactivation = 0.0;
};

// Forward + explicit backprop for one sample without dropout. Returns the
// loss; gradients are written to `out`.
double forward_backward(const GcnModel& model, const GraphSample& sample, Gradients& out);

struct TrainResult {
    GcnModel model;
    std::vector<double> loss_trace;  // mean BCE per epoch
};

// Full-batch training with adaptive moment estimation; deterministic for a
// fixed seed. Requires both classes present.
TrainResult train(const std::vector<GraphSample>& samples, const TrainConfig& config);

struct Classification {
    int label = 0;
    double probability = 0.0;
};

Classification classify(const GcnModel& model, const CausalGraph& graph,
                        const PriorKnowledge& prior, double threshold = 0.5);

}  // namespace incadet
