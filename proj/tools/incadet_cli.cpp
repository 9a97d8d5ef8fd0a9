#include "incadet/config.hpp"
#include "incadet/pipeline.hpp"
#include "incadet/svgplot.hpp"
#include "incadet/synth.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;
using incadet::PipelineConfig;
using incadet::PipelineResult;

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string series_to_csv(const incadet::RawSeries& series) {
    std::ostringstream out;
    out.precision(17);
    for (std::size_t i = 0; i < series.schema.feature_names.size(); ++i) {
        if (i) out << ",";
        out << series.schema.feature_names[i];
    }
    out << ",label\n";
    for (long r = 0; r < series.rows(); ++r) {
        for (long c = 0; c < series.values.cols(); ++c) {
            if (c) out << ",";
            out << series.values(r, c);
        }
        out << "," << series.row_labels[static_cast<std::size_t>(r)] << "\n";
    }
    return out.str();
}

struct TruthInfo {
    incadet::PriorKnowledge prior;
    int rows_per_window = 0;
};

TruthInfo truth_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    TruthInfo truth;
    for (const auto& n : j.at("prior").at("attack_nodes")) {
        truth.prior.attack_nodes.insert(n.get<std::string>());
    }
    for (const auto& n : j.at("prior").at("impact_nodes")) {
        truth.prior.impact_nodes.insert(n.get<std::string>());
    }
    truth.rows_per_window = j.at("rows_per_window").get<int>();
    return truth;
}

void write_run_artifacts(const fs::path& dir, const PipelineResult& result) {
    write_file(dir / "report.json", result.report_json());
    write_file(dir / "trace.jsonl", result.traces_jsonl());
    write_file(dir / "attack_graph.json", incadet::graph_to_json(result.attack_graph));
    write_file(dir / "normal_graph.json", incadet::graph_to_json(result.normal_graph));
    write_file(dir / "buffer.json", result.buffer.to_json());
    write_file(dir / "model.json", result.model.to_json());
}

std::string metric_or_na(const std::optional<double>& v) {
    if (!v) return "n/a";
    std::ostringstream s;
    s.precision(4);
    s << std::fixed << *v;
    return s.str();
}

void print_summary(const PipelineResult& result) {
    std::cout << "windows: " << result.train_windows << " train / " << result.test_windows
              << " test\n"
              << "triggers fired: " << result.trigger_windows.size()
              << ", missed: " << result.missed_triggers << "\n"
              << "F1 " << metric_or_na(result.report.f1) << "  ROC-AUC "
              << metric_or_na(result.report.roc_auc) << "  PRC-AUC "
              << metric_or_na(result.report.prc_auc) << "  MAR "
              << metric_or_na(result.report.mar) << "  MAE " << metric_or_na(result.report.mae)
              << "\n"
              << "decision threshold " << result.decision_threshold << "\n"
              << "total time " << result.timings.total_s << " s\n";
}

std::vector<double> read_numbers(const fs::path& path) {
    std::istringstream in(read_file(path));
    std::vector<double> values;
    double v = 0.0;
    while (in >> v) values.push_back(v);
    return values;
}

std::vector<int> to_binary(const std::vector<double>& values, const char* what) {
    std::vector<int> out;
    for (const double v : values) {
        if (v != 0.0 && v != 1.0) throw std::runtime_error(std::string(what) + " must be 0/1");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Streaming causal-graph anomaly detection"};
    app.require_subcommand(1);

    // --- generate ---------------------------------------------------------
    auto* generate = app.add_subcommand("generate", "Write a synthetic labeled stream");
    std::string gen_output = "scenario.csv";
    std::string gen_truth = "truth.json";
    int gen_windows = 60, gen_rows = 250;
    unsigned int gen_seed = 7;
    generate->add_option("-o,--output", gen_output, "CSV output path");
    generate->add_option("-t,--truth", gen_truth, "ground-truth JSON path");
    generate->add_option("-w,--windows", gen_windows, "number of windows");
    generate->add_option("-k,--rows-per-window", gen_rows, "rows per window");
    generate->add_option("-s,--seed", gen_seed, "generator seed");
    generate->callback([&] {
        const incadet::ScenarioSpec spec = incadet::default_scenario(gen_seed);
        const incadet::GeneratedScenario scenario =
            incadet::generate(spec, gen_windows, gen_rows);
        write_file(gen_output, series_to_csv(scenario.series));

        nlohmann::json truth;
        truth["window_labels"] = scenario.window_labels;
        truth["rows_per_window"] = gen_rows;
        truth["prior"] = {
            {"attack_nodes", std::vector<std::string>(scenario.prior.attack_nodes.begin(),
                                                      scenario.prior.attack_nodes.end())},
            {"impact_nodes", std::vector<std::string>(scenario.prior.impact_nodes.begin(),
                                                      scenario.prior.impact_nodes.end())}};
        truth["true_graphs"] = nlohmann::json::array();
        for (const incadet::CausalGraph& g : scenario.true_graphs) {
            truth["true_graphs"].push_back(nlohmann::json::parse(incadet::graph_to_json(g)));
        }
        write_file(gen_truth, truth.dump(2));
        std::cout << "wrote " << gen_output << " (" << scenario.series.rows() << " rows) and "
                  << gen_truth << "\n";
    });

    // --- run ----------------------------------------------------------------
    auto* run = app.add_subcommand("run", "Run the detection pipeline on a labeled CSV");
    std::string run_config, run_input, run_truth;
    std::string run_outdir = "out";
    run->add_option("-c,--config", run_config, "key = value config file");
    run->add_option("-i,--input", run_input, "labeled CSV stream")->required();
    run->add_option("-t,--truth", run_truth, "take prior knowledge from this truth JSON");
    run->add_option("-o,--output-dir", run_outdir, "artifact directory");
    run->callback([&] {
        PipelineConfig config;
        if (!run_config.empty()) config = incadet::load_config(run_config);
        incadet::CsvOptions csv;
        csv.label_column = config.label_column;
        const incadet::RawSeries series = incadet::load_csv(run_input, csv);

        PipelineResult result;
        if (!run_truth.empty()) {
            // Windows must line up with the generator's labeling grid.
            const TruthInfo truth = truth_from_json(read_file(run_truth));
            config.window_length = truth.rows_per_window;
            result = incadet::run_pipeline(config, series, truth.prior);
        } else {
            result = incadet::run_pipeline(config, series);
        }
        write_run_artifacts(run_outdir, result);
        print_summary(result);
    });

    // --- ablate ---------------------------------------------------------------
    auto* ablate = app.add_subcommand("ablate", "Re-run with each component switched off");
    std::string ab_config, ab_input, ab_truth;
    std::string ab_output = "ablation.json";
    ablate->add_option("-c,--config", ab_config, "key = value config file");
    ablate->add_option("-i,--input", ab_input, "labeled CSV stream")->required();
    ablate->add_option("-t,--truth", ab_truth, "take prior knowledge from this truth JSON");
    ablate->add_option("-o,--output", ab_output, "ablation matrix JSON path");
    ablate->callback([&] {
        PipelineConfig base;
        if (!ab_config.empty()) base = incadet::load_config(ab_config);
        incadet::CsvOptions csv;
        csv.label_column = base.label_column;
        const incadet::RawSeries series = incadet::load_csv(ab_input, csv);
        incadet::PriorKnowledge prior;
        if (!ab_truth.empty()) {
            const TruthInfo truth = truth_from_json(read_file(ab_truth));
            prior = truth.prior;
            base.window_length = truth.rows_per_window;
        } else {
            prior.attack_nodes.insert(base.attack_nodes.begin(), base.attack_nodes.end());
            prior.impact_nodes.insert(base.impact_nodes.begin(), base.impact_nodes.end());
        }

        struct Row {
            const char* name;
            bool no_buffer, no_cer, no_lags;
        };
        const std::vector<Row> rows = {{"full", false, false, false},
                                       {"no_replay_buffer", true, false, false},
                                       {"no_reinforcement", false, true, false},
                                       {"no_lagged_discovery", false, false, true}};
        nlohmann::json table = nlohmann::json::array();
        for (const Row& row : rows) {
            PipelineConfig config = base;
            config.disable_replay_buffer = row.no_buffer;
            config.disable_cer = row.no_cer;
            config.disable_lagged_discovery = row.no_lags;
            const PipelineResult result = incadet::run_pipeline(config, series, prior);
            nlohmann::json entry = nlohmann::json::parse(result.report_json());
            entry["setting"] = row.name;
            table.push_back(std::move(entry));
            std::cout << row.name << ": F1 " << metric_or_na(result.report.f1) << "\n";
        }
        write_file(ab_output, table.dump(2));
    });

    // --- metrics ---------------------------------------------------------------
    auto* metrics = app.add_subcommand("metrics", "Score a prediction file against labels");
    std::string m_preds, m_labels, m_scores, m_output;
    metrics->add_option("-p,--predictions", m_preds, "0/1 predictions, one per line")->required();
    metrics->add_option("-l,--labels", m_labels, "0/1 labels, one per line")->required();
    metrics->add_option("-s,--scores", m_scores, "real scores, one per line (defaults to predictions)");
    metrics->add_option("-o,--output", m_output, "report JSON path (default stdout)");
    metrics->callback([&] {
        const std::vector<int> predictions = to_binary(read_numbers(m_preds), "predictions");
        const std::vector<int> labels = to_binary(read_numbers(m_labels), "labels");
        std::vector<double> scores;
        if (m_scores.empty()) {
            scores.assign(predictions.begin(), predictions.end());
        } else {
            scores = read_numbers(m_scores);
        }
        const incadet::MetricsReport report = incadet::compute_report(scores, predictions, labels);
        if (m_output.empty()) {
            std::cout << report.to_json() << "\n";
        } else {
            write_file(m_output, report.to_json());
        }
    });

    // --- plot -------------------------------------------------------------------
    auto* plot = app.add_subcommand("plot", "Render ROC/PRC/timeline SVGs from a report");
    std::string p_report;
    std::string p_outdir = "plots";
    plot->add_option("-r,--report", p_report, "report JSON from run or metrics")->required();
    plot->add_option("-o,--output-dir", p_outdir, "SVG directory");
    plot->callback([&] {
        const incadet::MetricsReport report = incadet::MetricsReport::from_json(read_file(p_report));
        write_file(fs::path(p_outdir) / "roc.svg", incadet::roc_svg(report));
        write_file(fs::path(p_outdir) / "prc.svg", incadet::prc_svg(report));
        write_file(fs::path(p_outdir) / "timeline.svg", incadet::timeline_svg(report));
        std::cout << "wrote roc.svg, prc.svg, timeline.svg to " << p_outdir << "\n";
    });

    try {
        CLI11_PARSE(app, argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
