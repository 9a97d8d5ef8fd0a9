#include "incadet/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace incadet {

void SeriesSchema::validate() const {
    if (feature_names.empty()) {
        throw std::invalid_argument("schema has no features");
    }
    if (sample_period <= 0.0) {
        throw std::invalid_argument("sample_period must be positive");
    }
    std::unordered_set<std::string> seen;
    for (const auto& name : feature_names) {
        if (name.empty()) {
            throw std::invalid_argument("feature names must be non-empty");
        }
        if (!seen.insert(name).second) {
            throw std::invalid_argument("duplicate feature name: " + name);
        }
    }
}

namespace {

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        cells.push_back(trim(cell));
    }
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

bool parse_double(const std::string& text, double& out) {
    if (text.empty()) return false;
    const char* begin = text.c_str();
    char* end = nullptr;
    double value = std::strtod(begin, &end);
    if (end == begin || *end != '\0') return false;
    if (!std::isfinite(value)) return false;
    out = value;
    return true;
}

}  // namespace

RawSeries load_csv(const std::string& path, const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open CSV file: " + path);
    }

    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("CSV file is empty: " + path);
    }
    std::vector<std::string> header = split_csv_line(line);
    if (header.empty()) {
        throw std::runtime_error("CSV header row is empty: " + path);
    }

    bool has_label_column = header.back() == options.label_column;
    std::size_t feature_cols = header.size() - (has_label_column ? 1 : 0);
    if (feature_cols == 0) {
        throw std::runtime_error("CSV has no feature columns: " + path);
    }

    SeriesSchema schema;
    schema.feature_names.assign(header.begin(), header.begin() + feature_cols);
    if (options.schema_hint) {
        schema.sample_period = options.schema_hint->sample_period;
        if (options.schema_hint->feature_names != schema.feature_names) {
            throw std::runtime_error("CSV header does not match schema hint");
        }
    }
    schema.validate();

    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    std::size_t dropped = 0;

    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            ++dropped;
            continue;
        }
        std::vector<double> row(feature_cols);
        bool ok = true;
        for (std::size_t c = 0; c < feature_cols; ++c) {
            if (!parse_double(cells[c], row[c])) {
                ok = false;
                break;
            }
        }
        int label = 0;
        if (ok && has_label_column) {
            double raw = 0.0;
            ok = parse_double(cells.back(), raw) && (raw == 0.0 || raw == 1.0);
            label = static_cast<int>(raw);
        }
        if (!ok) {
            ++dropped;
            continue;
        }
        rows.push_back(std::move(row));
        if (has_label_column) labels.push_back(label);
    }

    if (rows.size() < 2) {
        throw std::runtime_error("fewer than 2 valid data rows in " + path);
    }

    RawSeries series;
    series.schema = schema;
    series.dropped_rows = dropped;
    series.values.resize(static_cast<long>(rows.size()), static_cast<long>(feature_cols));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < feature_cols; ++c) {
            series.values(static_cast<long>(r), static_cast<long>(c)) = rows[r][c];
        }
    }
    series.row_labels = std::move(labels);
    return series;
}

StandardizeResult standardize(const RawSeries& series) {
    if (series.values.rows() == 0) {
        throw std::invalid_argument("cannot standardize an empty series");
    }
    StandardizeResult result;
    result.series = series;
    const long n = series.values.rows();
    for (long c = 0; c < series.values.cols(); ++c) {
        const double mean = series.values.col(c).mean();
        // Population standard deviation.
        const double var = (series.values.col(c).array() - mean).square().sum() / static_cast<double>(n);
        const double sd = std::sqrt(var);
        // Scale-aware cutoff: a column of identical values can pick up ~1e-16
        // of rounding noise through the mean, which must still count as
        // constant rather than blow up under division.
        if (sd <= 1e-12 * std::max(1.0, std::abs(mean))) {
            result.series.values.col(c).setZero();
            result.constant_features.push_back(static_cast<int>(c));
        } else {
            result.series.values.col(c) = (series.values.col(c).array() - mean) / sd;
        }
    }
    return result;
}

WindowedStream segment(const RawSeries& series, int window_length) {
    if (window_length < 2) {
        throw std::invalid_argument("window_length must be at least 2");
    }
    if (series.values.rows() < window_length) {
        throw std::invalid_argument("series shorter than one window");
    }

    WindowedStream stream;
    stream.schema = series.schema;
    stream.window_length = window_length;

    const long n_windows = series.values.rows() / window_length;
    stream.windows.reserve(static_cast<std::size_t>(n_windows));
    for (long w = 0; w < n_windows; ++w) {
        Window window;
        window.index = static_cast<int>(w);
        window.data = series.values.middleRows(w * window_length, window_length);
        if (series.has_labels()) {
            int label = 0;
            for (long r = w * window_length; r < (w + 1) * window_length; ++r) {
                if (series.row_labels[static_cast<std::size_t>(r)] == 1) {
                    label = 1;
                    break;
                }
            }
            window.label = label;
        }
        stream.windows.push_back(std::move(window));
    }
    return stream;
}

std::set<std::string> PriorKnowledge::all() const {
    std::set<std::string> d = attack_nodes;
    d.insert(impact_nodes.begin(), impact_nodes.end());
    return d;
}

void PriorKnowledge::validate(const SeriesSchema& schema) const {
    std::unordered_set<std::string> known(schema.feature_names.begin(), schema.feature_names.end());
    for (const auto& set : {attack_nodes, impact_nodes}) {
        for (const auto& node : set) {
            if (!known.count(node)) {
                throw std::invalid_argument("prior knowledge references unknown node: " + node);
            }
        }
    }
}

}  // namespace incadet
