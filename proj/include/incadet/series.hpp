#pragma once

#include <Eigen/Dense>

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace incadet {

/// Describes the columns of a multivariate time series.
struct SeriesSchema {
    std::vector<std::string> feature_names;
    double sample_period = 1.0;  // seconds per observation

    int feature_count() const { return static_cast<int>(feature_names.size()); }

    /// Throws std::invalid_argument on duplicate/empty names or a
    /// non-positive sample period.
    void validate() const;
};

/// Time-ordered rows of raw (or standardized) observations, one column per
/// feature, with optional per-row binary labels.
struct RawSeries {
    SeriesSchema schema;
    Eigen::MatrixXd values;       // N x M
    std::vector<int> row_labels;  // empty when unlabeled, else one {0,1} per row
    std::size_t dropped_rows = 0; // rows removed while cleaning the input

    long rows() const { return values.rows(); }
    bool has_labels() const { return !row_labels.empty(); }
};

struct CsvOptions {
    std::string label_column = "label";
    std::optional<SeriesSchema> schema_hint;
};

/// Reads a header-labelled CSV into a RawSeries. Rows containing missing or
/// non-numeric cells (including NaN/inf) are dropped and counted in
/// RawSeries::dropped_rows. A final column whose name matches
/// CsvOptions::label_column is split off as per-row labels.
RawSeries load_csv(const std::string& path, const CsvOptions& options = {});

struct StandardizeResult {
    RawSeries series;
    std::vector<int> constant_features;  // indices of features mapped to all-zeros
};

/// Maps every feature to sample mean 0 and population standard deviation 1.
/// Constant features become all-zeros and are flagged rather than errored.
StandardizeResult standardize(const RawSeries& series);

struct Window {
    int index = 0;
    Eigen::MatrixXd data;  // k x M
    std::optional<int> label;
};

struct WindowedStream {
    SeriesSchema schema;
    int window_length = 0;  // k, samples per window
    std::vector<Window> windows;
};

/// Splits a series into floor(N/k) contiguous, non-overlapping windows of k
/// rows; the trailing remainder is discarded. When the series carries row
/// labels, a window is labeled 1 if any of its rows is labeled 1.
WindowedStream segment(const RawSeries& series, int window_length);

/// Domain knowledge about which nodes an attack touches (the set D).
struct PriorKnowledge {
    std::set<std::string> attack_nodes;
    std::set<std::string> impact_nodes;

    std::set<std::string> all() const;  // attack_nodes ∪ impact_nodes
    bool empty() const { return attack_nodes.empty() && impact_nodes.empty(); }

    /// Every identifier must appear in the schema.
    void validate(const SeriesSchema& schema) const;
};

}  // namespace incadet
