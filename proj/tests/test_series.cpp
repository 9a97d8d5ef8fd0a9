#include "incadet/series.hpp"

#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>
#include <string>

using namespace incadet;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const std::string path = std::string("/tmp/incadet_test_") + name;
    std::ofstream out(path);
    out << content;
    return path;
}

RawSeries noise_series(int rows, int cols, unsigned int seed) {
    RawSeries s;
    for (int c = 0; c < cols; ++c) s.schema.feature_names.push_back("f" + std::to_string(c));
    std::mt19937 rng(seed);
    std::normal_distribution<double> dist;
    s.values.resize(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) s.values(r, c) = dist(rng);
    }
    return s;
}

}  // namespace

TEST_CASE("schema validation rejects bad inputs") {
    SeriesSchema schema;
    CHECK_THROWS_AS(schema.validate(), std::invalid_argument);  // no features
    schema.feature_names = {"a", "a"};
    CHECK_THROWS_AS(schema.validate(), std::invalid_argument);  // duplicate
    schema.feature_names = {"a", ""};
    CHECK_THROWS_AS(schema.validate(), std::invalid_argument);  // empty name
    schema.feature_names = {"a", "b"};
    schema.sample_period = 0.0;
    CHECK_THROWS_AS(schema.validate(), std::invalid_argument);
    schema.sample_period = 1.0;
    CHECK_NOTHROW(schema.validate());
}

TEST_CASE("standardize maps [1,2,3] to +-sqrt(3/2) around zero") {
    RawSeries s;
    s.schema.feature_names = {"a"};
    s.values.resize(3, 1);
    s.values << 1.0, 2.0, 3.0;
    const StandardizeResult result = standardize(s);
    CHECK(result.series.values(0, 0) == doctest::Approx(-1.224744871391589).epsilon(1e-12));
    CHECK(result.series.values(1, 0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(result.series.values(2, 0) == doctest::Approx(1.224744871391589).epsilon(1e-12));
    CHECK(result.constant_features.empty());
}

TEST_CASE("standardize is idempotent and flags constant features") {
    RawSeries s = noise_series(200, 3, 11);
    s.values.col(1).setConstant(4.2);

    const StandardizeResult once = standardize(s);
    CHECK(once.constant_features == std::vector<int>{1});
    CHECK((once.series.values.col(1).array() == 0.0).all());

    const StandardizeResult twice = standardize(once.series);
    CHECK((once.series.values - twice.series.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("segment reproduces the leading rows and ORs labels") {
    RawSeries s = noise_series(25, 2, 3);
    s.row_labels.assign(25, 0);
    s.row_labels[7] = 1;   // window 1 of k=5
    s.row_labels[20] = 1;  // window 4

    const WindowedStream stream = segment(s, 5);
    REQUIRE(stream.windows.size() == 5);
    CHECK(stream.window_length == 5);

    Eigen::MatrixXd stitched(25, 2);
    for (int w = 0; w < 5; ++w) {
        stitched.middleRows(w * 5, 5) = stream.windows[static_cast<std::size_t>(w)].data;
        CHECK(stream.windows[static_cast<std::size_t>(w)].index == w);
    }
    CHECK((stitched - s.values).cwiseAbs().maxCoeff() == 0.0);

    CHECK(stream.windows[0].label == 0);
    CHECK(stream.windows[1].label == 1);
    CHECK(stream.windows[4].label == 1);
}

TEST_CASE("segment discards the trailing partial window") {
    const RawSeries s = noise_series(23, 2, 5);
    const WindowedStream stream = segment(s, 5);
    CHECK(stream.windows.size() == 4);  // 23 = 4*5 + 3
    for (const Window& w : stream.windows) {
        CHECK_FALSE(w.label.has_value());  // unlabeled input stays unlabeled
    }
}

TEST_CASE("segment is deterministic and validates its arguments") {
    const RawSeries s = noise_series(30, 2, 9);
    const WindowedStream a = segment(s, 6);
    const WindowedStream b = segment(s, 6);
    REQUIRE(a.windows.size() == b.windows.size());
    for (std::size_t i = 0; i < a.windows.size(); ++i) {
        CHECK((a.windows[i].data - b.windows[i].data).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK_THROWS_AS(segment(s, 1), std::invalid_argument);
    CHECK_THROWS_AS(segment(s, 31), std::invalid_argument);
}

TEST_CASE("load_csv parses values, splits labels, and drops bad rows") {
    const std::string path = write_temp("basic.csv",
                                        "a,b,label\n"
                                        "1.0,2.0,0\n"
                                        "3.0,,1\n"        // missing cell -> dropped
                                        "4.0,abc,0\n"     // non-numeric -> dropped
                                        "5.0,6.0,1\n");
    const RawSeries s = load_csv(path);
    CHECK(s.schema.feature_names == std::vector<std::string>{"a", "b"});
    REQUIRE(s.rows() == 2);
    CHECK(s.values(0, 0) == 1.0);
    CHECK(s.values(1, 1) == 6.0);
    CHECK(s.row_labels == std::vector<int>{0, 1});
    CHECK(s.dropped_rows == 2);
    std::remove(path.c_str());
}

TEST_CASE("load_csv works without a label column and rejects missing files") {
    const std::string path = write_temp("nolabel.csv", "x,y\n1,2\n3,4\n");
    const RawSeries s = load_csv(path);
    CHECK_FALSE(s.has_labels());
    CHECK(s.rows() == 2);
    std::remove(path.c_str());
    CHECK_THROWS(load_csv("/tmp/incadet_test_definitely_missing.csv"));
}

TEST_CASE("prior knowledge validates against the schema") {
    SeriesSchema schema;
    schema.feature_names = {"a", "b", "c"};
    PriorKnowledge prior;
    prior.attack_nodes = {"a"};
    prior.impact_nodes = {"b"};
    CHECK_NOTHROW(prior.validate(schema));
    CHECK(prior.all() == std::set<std::string>{"a", "b"});
    CHECK_FALSE(prior.empty());

    prior.impact_nodes.insert("ghost");
    CHECK_THROWS_AS(prior.validate(schema), std::invalid_argument);
}
