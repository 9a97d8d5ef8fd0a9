#pragma once

#include "incadet/config.hpp"
#include "incadet/gcn.hpp"
#include "incadet/graph.hpp"
#include "incadet/incremental.hpp"
#include "incadet/metrics.hpp"
#include "incadet/series.hpp"

#include <optional>
#include <string>
#include <vector>

namespace incadet {

struct StageTimings {
    double ingest_s = 0.0;
    double discovery_s = 0.0;
    double trigger_s = 0.0;
    double incremental_s = 0.0;
    double training_s = 0.0;
    double inference_s = 0.0;
    double total_s = 0.0;
};

// One JSON-lines record per window.
struct WindowTrace {
    int window = 0;
    int label = 0;
    std::string phase;   // train | test
    std::string status;  // normal | attack
    bool trigger_fired = false;
    std::optional<double> trigger_similarity;
    std::optional<double> stop_divergence;
    bool converged = false;
    int attack_edges = 0;
    int normal_edges = 0;
    int buffer_size = 0;
    std::optional<double> probability;  // test windows only
    std::optional<int> prediction;

    std::string to_json() const;
};

struct PipelineResult {
    MetricsReport report;  // over the held-out test windows
    StageTimings timings;
    std::vector<WindowTrace> traces;
    std::vector<int> trigger_windows;  // actual trigger fires
    int missed_triggers = 0;           // labeled attacks the trigger never saw
    int train_windows = 0;
    int test_windows = 0;
    double decision_threshold = 0.5;  // classification boundary in use

    CausalGraph attack_graph;
    CausalGraph normal_graph;
    ReplayBuffer buffer;
    GcnModel model;

    // Metrics plus stage timings and trigger bookkeeping.
    std::string report_json() const;
    std::string traces_jsonl() const;
};

// Flags a window when any feature's window mean exceeds three standard
// errors (3/sqrt(k) for unit-variance features). The comparison baseline
// for the end-to-end evaluation.
std::vector<int> mean_threshold_baseline(const WindowedStream& stream);

// Full flow: ingest -> per-window discovery -> trigger -> incremental
// learning -> classifier training on accumulated graph samples -> held-out
// classification. Deterministic for a fixed config and stream.
PipelineResult run_pipeline(const PipelineConfig& config, const RawSeries& series,
                            const PriorKnowledge& prior);

// Convenience overload taking prior knowledge from the config's node lists.
PipelineResult run_pipeline(const PipelineConfig& config, const RawSeries& series);

}  // namespace incadet
