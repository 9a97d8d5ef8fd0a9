#include "incadet/pipeline.hpp"

#include "incadet/discovery.hpp"
#include "incadet/trigger.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace incadet {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

template <typename F>
auto staged(const char* stage, F&& fn) {
    try {
        return fn();
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("stage ") + stage + ": " + e.what());
    }
}

nlohmann::json optional_json(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

std::vector<int> mean_threshold_baseline(const WindowedStream& stream) {
    std::vector<int> flags;
    const double limit = 3.0 / std::sqrt(static_cast<double>(stream.window_length));
    for (const Window& w : stream.windows) {
        const double worst = w.data.colwise().mean().cwiseAbs().maxCoeff();
        flags.push_back(worst > limit ? 1 : 0);
    }
    return flags;
}

PipelineResult run_pipeline(const PipelineConfig& config, const RawSeries& series,
                            const PriorKnowledge& prior) {
    config.validate();
    const Clock::time_point run_start = Clock::now();
    PipelineResult result;

    // --- ingest ---------------------------------------------------------
    Clock::time_point t0 = Clock::now();
    const WindowedStream stream = staged("ingest", [&] {
        if (!series.has_labels()) {
            throw std::invalid_argument("training requires a labeled stream");
        }
        if (prior.empty()) {
            throw std::invalid_argument("prior knowledge (attack/impact nodes) must be non-empty");
        }
        prior.validate(series.schema);
        RawSeries prepared = config.standardize ? standardize(series).series : series;
        WindowedStream windows = segment(prepared, config.window_length);
        if (windows.windows.size() < 4) {
            throw std::invalid_argument("need at least 4 windows, got " +
                                        std::to_string(windows.windows.size()));
        }
        return windows;
    });
    result.timings.ingest_s = seconds_since(t0);

    const int n_windows = static_cast<int>(stream.windows.size());
    std::vector<int> labels(static_cast<std::size_t>(n_windows));
    for (int w = 0; w < n_windows; ++w) {
        labels[static_cast<std::size_t>(w)] = stream.windows[static_cast<std::size_t>(w)].label.value_or(0);
    }

    // --- per-window discovery -------------------------------------------
    t0 = Clock::now();
    const int lag = config.disable_lagged_discovery ? 0 : config.lag_order;
    const std::vector<CausalGraph> graphs = staged("discovery", [&] {
        std::vector<CausalGraph> fitted;
        fitted.reserve(static_cast<std::size_t>(n_windows));
        for (const Window& w : stream.windows) {
            fitted.push_back(fit_window(w.data, lag, stream.schema.feature_names, config.discovery));
        }
        return fitted;
    });
    result.timings.discovery_s = seconds_since(t0);

    int n_train = static_cast<int>(std::floor(config.train_fraction * n_windows));
    n_train = std::max(2, std::min(n_train, n_windows - 1));
    result.train_windows = n_train;
    result.test_windows = n_windows - n_train;

    // --- trigger + incremental learning over the training prefix ---------
    TriggerState trigger(config.similarity_threshold, config.histogram_bins, config.weight_range);
    IncrementalState state = IncrementalState::initial(
        stream.schema.feature_names, lag,
        config.buffer_capacity > 0 ? std::optional<std::size_t>(config.buffer_capacity)
                                   : std::nullopt);
    IncrementalConfig inc_config;
    inc_config.reinforcement = config.reinforcement;
    inc_config.weight_cap = config.weight_cap;
    inc_config.stop_threshold = config.stop_threshold;
    inc_config.histogram_bins = config.histogram_bins;
    inc_config.outdegree_range = config.outdegree_range;
    inc_config.use_buffer = !config.disable_replay_buffer;
    inc_config.use_cer = !config.disable_cer;

    std::vector<GraphSample> samples;
    bool in_attack = false;
    bool episode_converged = false;

    staged("incremental", [&] {
        for (int w = 0; w < n_train; ++w) {
            const CausalGraph& graph = graphs[static_cast<std::size_t>(w)];
            const int label = labels[static_cast<std::size_t>(w)];
            WindowTrace trace;
            trace.window = w;
            trace.label = label;
            trace.phase = "train";

            if (!in_attack) {
                const Clock::time_point tt = Clock::now();
                const TriggerDecision decision = trigger.check(graph, w);
                result.timings.trigger_s += seconds_since(tt);
                trace.trigger_similarity = decision.similarity;

                bool enter = decision.fired;
                if (decision.fired) {
                    trace.trigger_fired = true;
                    result.trigger_windows.push_back(w);
                } else if (label == 1) {
                    ++result.missed_triggers;  // labels still route training
                    enter = true;
                }

                if (enter) {
                    begin_attack(state, graph);
                    in_attack = true;
                    episode_converged = false;
                    trace.status = "attack";
                } else {
                    const Clock::time_point ti = Clock::now();
                    incremental_step(state, graph, prior, SystemStatus::normal, inc_config);
                    result.timings.incremental_s += seconds_since(ti);
                    trace.status = "normal";
                }
            } else if (label == 0) {
                // Episode over: back to monitoring, re-arm the trigger on
                // this first post-attack graph.
                in_attack = false;
                trigger.reset(graph);
                const Clock::time_point ti = Clock::now();
                incremental_step(state, graph, prior, SystemStatus::normal, inc_config);
                result.timings.incremental_s += seconds_since(ti);
                trace.status = "normal";
            } else {
                trace.status = "attack";
                if (!episode_converged) {
                    const Clock::time_point ti = Clock::now();
                    const StepDiagnostics diag =
                        incremental_step(state, graph, prior, SystemStatus::attack, inc_config);
                    result.timings.incremental_s += seconds_since(ti);
                    trace.stop_divergence = diag.divergence;
                    episode_converged = diag.converged;
                }
                trace.converged = episode_converged;
            }

            samples.push_back(featurize(graph, prior));
            samples.back().label = label;
            if (trace.status == "attack") {
                samples.push_back(featurize(state.attack_graph, prior));
                samples.back().label = 1;
            } else {
                samples.push_back(featurize(state.normal_graph, prior));
                samples.back().label = 0;
            }

            trace.attack_edges = static_cast<int>(state.attack_graph.edge_count());
            trace.normal_edges = static_cast<int>(state.normal_graph.edge_count());
            trace.buffer_size = static_cast<int>(state.buffer.size());
            result.traces.push_back(std::move(trace));
        }
    });

    // --- classifier training ---------------------------------------------
    t0 = Clock::now();
    bool train_has_pos = false, train_has_neg = false;
    for (int w = 0; w < n_train; ++w) {
        (labels[static_cast<std::size_t>(w)] == 1 ? train_has_pos : train_has_neg) = true;
    }
    const bool single_class = !train_has_pos || !train_has_neg;

    TrainConfig train_config;
    train_config.learning_rate = config.learning_rate;
    train_config.epochs = config.epochs;
    train_config.seed = config.seed;
    train_config.beta1 = config.adam_beta1;
    train_config.beta2 = config.adam_beta2;
    train_config.epsilon = config.adam_epsilon;
    train_config.hidden_width = config.hidden_width;
    train_config.dropout = config.dropout;

    const double threshold = config.classify_threshold;
    staged("training", [&] {
        if (single_class) {
            // Nothing to discriminate: keep an untrained model and predict
            // the only class seen in training.
            result.model = GcnModel::init(3, config.hidden_width, config.dropout, config.seed);
            return;
        }
        result.model = train(samples, train_config).model;
        for (int w = 0; w < n_train; ++w) {
            result.traces[static_cast<std::size_t>(w)].probability =
                classify(result.model, graphs[static_cast<std::size_t>(w)], prior, threshold)
                    .probability;
        }
    });
    result.decision_threshold = threshold;
    result.timings.training_s = seconds_since(t0);

    // --- held-out classification ------------------------------------------
    t0 = Clock::now();
    std::vector<double> scores;
    std::vector<int> predictions, test_labels;
    staged("inference", [&] {
        for (int w = n_train; w < n_windows; ++w) {
            Classification c;
            if (single_class) {
                c.label = train_has_pos ? 1 : 0;
                c.probability = static_cast<double>(c.label);
            } else {
                c = classify(result.model, graphs[static_cast<std::size_t>(w)], prior, threshold);
            }
            scores.push_back(c.probability);
            predictions.push_back(c.label);
            test_labels.push_back(labels[static_cast<std::size_t>(w)]);

            WindowTrace trace;
            trace.window = w;
            trace.label = labels[static_cast<std::size_t>(w)];
            trace.phase = "test";
            trace.status = c.label == 1 ? "attack" : "normal";
            trace.probability = c.probability;
            trace.prediction = c.label;
            trace.attack_edges = static_cast<int>(state.attack_graph.edge_count());
            trace.normal_edges = static_cast<int>(state.normal_graph.edge_count());
            trace.buffer_size = static_cast<int>(state.buffer.size());
            result.traces.push_back(std::move(trace));
        }
    });
    result.timings.inference_s = seconds_since(t0);

    result.report = compute_report(scores, predictions, test_labels);
    result.attack_graph = state.attack_graph;
    result.normal_graph = state.normal_graph;
    result.buffer = state.buffer;
    result.timings.total_s = seconds_since(run_start);
    return result;
}

PipelineResult run_pipeline(const PipelineConfig& config, const RawSeries& series) {
    PriorKnowledge prior;
    prior.attack_nodes.insert(config.attack_nodes.begin(), config.attack_nodes.end());
    prior.impact_nodes.insert(config.impact_nodes.begin(), config.impact_nodes.end());
    return run_pipeline(config, series, prior);
}

std::string WindowTrace::to_json() const {
    nlohmann::json j;
    j["window"] = window;
    j["label"] = label;
    j["phase"] = phase;
    j["status"] = status;
    j["trigger_fired"] = trigger_fired;
    j["trigger_similarity"] = optional_json(trigger_similarity);
    j["stop_divergence"] = optional_json(stop_divergence);
    j["converged"] = converged;
    j["attack_edges"] = attack_edges;
    j["normal_edges"] = normal_edges;
    j["buffer_size"] = buffer_size;
    j["probability"] = optional_json(probability);
    j["prediction"] = prediction ? nlohmann::json(*prediction) : nlohmann::json(nullptr);
    return j.dump();
}

std::string PipelineResult::report_json() const {
    nlohmann::json j = nlohmann::json::parse(report.to_json());
    j["timings"] = {{"ingest_s", timings.ingest_s},
                    {"discovery_s", timings.discovery_s},
                    {"trigger_s", timings.trigger_s},
                    {"incremental_s", timings.incremental_s},
                    {"training_s", timings.training_s},
                    {"inference_s", timings.inference_s},
                    {"total_s", timings.total_s}};
    j["trigger_windows"] = trigger_windows;
    j["missed_triggers"] = missed_triggers;
    j["train_windows"] = train_windows;
    j["test_windows"] = test_windows;
    j["decision_threshold"] = decision_threshold;
    return j.dump(2);
}

std::string PipelineResult::traces_jsonl() const {
    std::string out;
    for (const WindowTrace& t : traces) {
        out += t.to_json();
        out += '\n';
    }
    return out;
}

}  // namespace incadet
