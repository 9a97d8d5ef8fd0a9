#pragma once

#include "incadet/discovery.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace incadet {

// Everything tunable in the pipeline, flattened into one key-value config.
// Defaults follow the reference settings: omega = 2, similarity threshold
// 0.9, stop threshold 0.1, three conv layers, Adam at 0.01.
struct PipelineConfig {
    // ingest
    int window_length = 60;
    double sample_period = 1.0;
    bool standardize = true;
    std::string label_column = "label";

    // discovery
    int lag_order = 1;
    DiscoveryConfig discovery;

    // trigger
    int histogram_bins = 20;
    double weight_range = 2.0;          // histogram domain [0, weight_range] over |w|
    double similarity_threshold = 0.9;  // fire when 1 - JS falls below this

    // incremental learning
    double reinforcement = 2.0;   // omega
    double weight_cap = 2.0;      // ceiling on reinforced |weight|
    double stop_threshold = 0.1;  // converged when out-degree JS falls below
    std::size_t buffer_capacity = 0;  // 0 = unbounded
    double outdegree_range = 4.0;     // histogram domain for stopping scores

    // classifier
    int hidden_width = 16;
    double dropout = 0.2;
    double learning_rate = 0.01;
    int epochs = 300;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    double classify_threshold = 0.5;

    // evaluation
    double train_fraction = 2.0 / 3.0;
    unsigned int seed = 42;

    // prior knowledge (comma-separated node names in the config file)
    std::vector<std::string> attack_nodes;
    std::vector<std::string> impact_nodes;

    // ablation switches
    bool disable_replay_buffer = false;
    bool disable_cer = false;
    bool disable_lagged_discovery = false;

    void validate() const;  // throws std::invalid_argument on bad ranges
};

// Applies a named lag profile (swat, wadi, te, smd) to lag_order.
void apply_profile(PipelineConfig& config, const std::string& profile);

// Sets one key (as it appears in the config file) from its string value.
// Throws std::invalid_argument for unknown keys or unparseable values.
void set_config_key(PipelineConfig& config, const std::string& key, const std::string& value);

// Parses a `key = value` file with `#` comments and blank lines.
PipelineConfig load_config(const std::string& path);

// Writes every key with its current value, suitable for load_config.
std::string config_to_string(const PipelineConfig& config);

}  // namespace incadet
