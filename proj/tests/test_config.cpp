#include "incadet/config.hpp"

#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

using namespace incadet;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const std::string path = std::string("/tmp/incadet_test_") + name;
    std::ofstream out(path);
    out << content;
    return path;
}

}  // namespace

TEST_CASE("defaults carry the reference settings") {
    const PipelineConfig c;
    CHECK(c.window_length == 60);
    CHECK(c.standardize);
    CHECK(c.label_column == "label");
    CHECK(c.lag_order == 1);
    CHECK(c.discovery.l1_intra == 0.1);
    CHECK(c.discovery.l1_lag == 0.1);
    CHECK(c.discovery.edge_threshold == 0.1);
    CHECK(c.discovery.max_outer_iterations == 100);
    CHECK(c.discovery.acyclicity_tolerance == 1e-8);
    CHECK(c.histogram_bins == 20);
    CHECK(c.weight_range == 2.0);
    CHECK(c.similarity_threshold == 0.9);
    CHECK(c.reinforcement == 2.0);
    CHECK(c.weight_cap == 2.0);
    CHECK(c.stop_threshold == 0.1);
    CHECK(c.buffer_capacity == 0);  // unbounded
    CHECK(c.hidden_width == 16);
    CHECK(c.dropout == 0.2);
    CHECK(c.learning_rate == 0.01);
    CHECK(c.epochs == 300);
    CHECK(c.classify_threshold == 0.5);
    CHECK(c.train_fraction == doctest::Approx(2.0 / 3.0));
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("load_config parses comments, spacing, and every key kind") {
    const std::string path = write_temp("conf.cfg",
                                        "# pipeline settings\n"
                                        "window_length = 45   # samples\n"
                                        "\n"
                                        "standardize= false\n"
                                        "  similarity_threshold =0.85\n"
                                        "attack_nodes = p1, p2 ,p3\n"
                                        "buffer_capacity = 128\n"
                                        "label_column = is_attack\n");
    const PipelineConfig c = load_config(path);
    CHECK(c.window_length == 45);
    CHECK_FALSE(c.standardize);
    CHECK(c.similarity_threshold == 0.85);
    CHECK(c.attack_nodes == std::vector<std::string>{"p1", "p2", "p3"});
    CHECK(c.buffer_capacity == 128);
    CHECK(c.label_column == "is_attack");
    std::remove(path.c_str());
}

TEST_CASE("load_config reports the offending line") {
    const std::string bad_key = write_temp("badkey.cfg", "window_length = 60\nwibble = 3\n");
    try {
        load_config(bad_key);
        FAIL("expected an error");
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        CHECK(msg.find(":2:") != std::string::npos);
        CHECK(msg.find("wibble") != std::string::npos);
    }
    std::remove(bad_key.c_str());

    const std::string bad_value = write_temp("badval.cfg", "epochs = many\n");
    CHECK_THROWS_AS(load_config(bad_value), std::invalid_argument);
    std::remove(bad_value.c_str());

    const std::string no_eq = write_temp("noeq.cfg", "just a line\n");
    CHECK_THROWS_AS(load_config(no_eq), std::invalid_argument);
    std::remove(no_eq.c_str());

    CHECK_THROWS(load_config("/tmp/incadet_test_missing.cfg"));
}

TEST_CASE("dataset profiles set the documented lag orders") {
    PipelineConfig c;
    apply_profile(c, "swat");
    CHECK(c.lag_order == 4);
    apply_profile(c, "wadi");
    CHECK(c.lag_order == 3);
    apply_profile(c, "te");
    CHECK(c.lag_order == 4);
    apply_profile(c, "smd");
    CHECK(c.lag_order == 1);
    CHECK_THROWS_AS(apply_profile(c, "mnist"), std::invalid_argument);

    set_config_key(c, "dataset_profile", "swat");
    CHECK(c.lag_order == 4);
}

TEST_CASE("validate rejects out-of-range settings") {
    auto broken = [](auto mutate) {
        PipelineConfig c;
        mutate(c);
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    };
    broken([](PipelineConfig& c) { c.window_length = 1; });
    broken([](PipelineConfig& c) { c.lag_order = -1; });
    broken([](PipelineConfig& c) { c.similarity_threshold = 1.5; });
    broken([](PipelineConfig& c) { c.reinforcement = 0.5; });
    broken([](PipelineConfig& c) { c.stop_threshold = 0.0; });
    broken([](PipelineConfig& c) { c.dropout = 1.0; });
    broken([](PipelineConfig& c) { c.train_fraction = 1.0; });
    broken([](PipelineConfig& c) { c.discovery.l1_intra = -0.1; });
    broken([](PipelineConfig& c) { c.epochs = 0; });
}

TEST_CASE("config_to_string round-trips through load_config") {
    PipelineConfig c;
    c.window_length = 37;
    c.similarity_threshold = 0.925;
    c.attack_nodes = {"x1", "x4"};
    c.impact_nodes = {"x2"};
    c.disable_cer = true;
    c.train_fraction = 0.7;

    const std::string path = write_temp("roundtrip.cfg", config_to_string(c));
    const PipelineConfig back = load_config(path);
    std::remove(path.c_str());

    CHECK(config_to_string(back) == config_to_string(c));
}
