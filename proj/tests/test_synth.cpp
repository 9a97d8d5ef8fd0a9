#include "incadet/synth.hpp"

#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "oracles.hpp"

using namespace incadet;

namespace {

// Two features, one intra edge x0 -> x1 at 0.8, no lags.
ScenarioSpec pair_spec() {
    ScenarioSpec spec;
    spec.feature_count = 2;
    spec.lag_order = 0;
    spec.true_intra = Eigen::MatrixXd::Zero(2, 2);
    spec.true_intra(0, 1) = 0.8;
    spec.noise_scale = 0.1;
    spec.seed = 5;
    return spec;
}

// Three-node chain x0 -> x1 -> x2 used for perturbation checks.
ScenarioSpec chain_spec() {
    ScenarioSpec spec;
    spec.feature_count = 3;
    spec.lag_order = 0;
    spec.true_intra = Eigen::MatrixXd::Zero(3, 3);
    spec.true_intra(0, 1) = 0.6;
    spec.true_intra(1, 2) = 0.5;
    spec.noise_scale = 0.1;
    spec.seed = 11;
    return spec;
}

AttackEpisode episode(int start, int end, std::vector<int> nodes, Perturbation p) {
    AttackEpisode e;
    e.start_window = start;
    e.end_window = end;
    e.nodes = std::move(nodes);
    e.perturbation = p;
    return e;
}

}  // namespace

TEST_CASE("scenario validation rejects malformed and unstable specs") {
    auto broken = [](auto&& mutate) {
        ScenarioSpec spec = chain_spec();
        spec.lag_order = 1;
        spec.true_lag = {Eigen::MatrixXd::Identity(3, 3) * 0.3};
        mutate(spec);
        CHECK_THROWS_AS(spec.validate(20), std::invalid_argument);
    };

    broken([](ScenarioSpec& s) { s.feature_count = 1; });
    broken([](ScenarioSpec& s) { s.true_intra = Eigen::MatrixXd::Zero(2, 3); });
    broken([](ScenarioSpec& s) { s.true_lag.clear(); });
    broken([](ScenarioSpec& s) { s.true_lag = {Eigen::MatrixXd::Zero(2, 2)}; });
    broken([](ScenarioSpec& s) { s.noise_scale = 0.0; });
    broken([](ScenarioSpec& s) { s.true_intra(1, 0) = 0.4; });  // 0 -> 1 -> 0 cycle
    broken([](ScenarioSpec& s) {
        s.episodes = {episode(-1, 3, {0}, {PerturbationKind::mean_shift, 0.5, 1.0})};
    });
    broken([](ScenarioSpec& s) {
        s.episodes = {episode(5, 4, {0}, {PerturbationKind::mean_shift, 0.5, 1.0})};
    });
    broken([](ScenarioSpec& s) {
        s.episodes = {episode(5, 20, {0}, {PerturbationKind::mean_shift, 0.5, 1.0})};
    });
    broken([](ScenarioSpec& s) {  // overlapping spans
        s.episodes = {episode(2, 5, {0}, {PerturbationKind::mean_shift, 0.5, 1.0}),
                      episode(5, 8, {1}, {PerturbationKind::mean_shift, 0.5, 1.0})};
    });
    broken([](ScenarioSpec& s) {
        s.episodes = {episode(2, 5, {}, {PerturbationKind::mean_shift, 0.5, 1.0})};
    });
    broken([](ScenarioSpec& s) {
        s.episodes = {episode(2, 5, {7}, {PerturbationKind::mean_shift, 0.5, 1.0})};
    });
    broken([](ScenarioSpec& s) {
        s.episodes = {episode(2, 5, {0}, {PerturbationKind::weight_scale, 0.0, 0.0})};
    });
    // base system unstable: AR coefficient at the spectral limit
    broken([](ScenarioSpec& s) { s.true_lag = {Eigen::MatrixXd::Identity(3, 3) * 0.96}; });
    // episode-only instability: scaling pushes a lag loop past the limit
    broken([](ScenarioSpec& s) {
        s.episodes = {episode(2, 5, {0}, {PerturbationKind::weight_scale, 0.0, 4.0})};
    });

    ScenarioSpec good = chain_spec();
    good.episodes = {episode(2, 5, {1}, {PerturbationKind::mean_shift, 0.5, 1.0})};
    CHECK_NOTHROW(good.validate(20));
}

TEST_CASE("lag spectral radius recovers autoregressive coefficients") {
    Eigen::MatrixXd intra = Eigen::MatrixXd::Zero(2, 2);
    CHECK(lag_spectral_radius(intra, {}) == 0.0);

    Eigen::MatrixXd ar1 = Eigen::MatrixXd::Zero(2, 2);
    ar1(0, 0) = 0.9;
    CHECK(lag_spectral_radius(intra, {ar1}) == doctest::Approx(0.9).epsilon(1e-9));

    // x_t = 0.5 x_{t-1} + 0.24 x_{t-2} has roots 0.8 and -0.3
    Eigen::MatrixXd l1 = Eigen::MatrixXd::Zero(2, 2);
    Eigen::MatrixXd l2 = Eigen::MatrixXd::Zero(2, 2);
    l1(0, 0) = 0.5;
    l2(0, 0) = 0.24;
    CHECK(lag_spectral_radius(intra, {l1, l2}) == doctest::Approx(0.8).epsilon(1e-9));
}

TEST_CASE("generation is shaped, labeled and seeded as requested") {
    ScenarioSpec spec = chain_spec();
    spec.episodes = {episode(2, 3, {1}, {PerturbationKind::mean_shift, 0.5, 1.0})};

    const GeneratedScenario s1 = generate(spec, 6, 20);
    CHECK(s1.series.values.rows() == 120);
    CHECK(s1.series.values.cols() == 3);
    CHECK(s1.series.row_labels.size() == 120);
    CHECK(s1.series.schema.feature_names == default_node_ids(3));
    CHECK(s1.window_labels == std::vector<int>{0, 0, 1, 1, 0, 0});
    REQUIRE(s1.true_graphs.size() == 6);

    for (int w = 0; w < 6; ++w) {
        for (int r = 0; r < 20; ++r) {
            CHECK(s1.series.row_labels[static_cast<std::size_t>(w * 20 + r)] ==
                  s1.window_labels[static_cast<std::size_t>(w)]);
        }
    }

    const GeneratedScenario s2 = generate(spec, 6, 20);
    CHECK((s1.series.values - s2.series.values).cwiseAbs().maxCoeff() == 0.0);

    spec.seed = 6;
    const GeneratedScenario s3 = generate(spec, 6, 20);
    CHECK((s1.series.values - s3.series.values).cwiseAbs().maxCoeff() > 0.0);

    CHECK_THROWS_AS(generate(spec, 0, 20), std::invalid_argument);
    CHECK_THROWS_AS(generate(spec, 6, 0), std::invalid_argument);
}

TEST_CASE("the stream obeys the declared structural equations") {
    // Intra edge: regressing x1 on x0 recovers the weight.
    const GeneratedScenario intra_case = generate(pair_spec(), 4, 500);
    const Eigen::VectorXd b =
        oracle::ols(intra_case.series.values.col(0), intra_case.series.values.col(1));
    CHECK(b[0] == doctest::Approx(0.8).epsilon(0.08));

    // Lag edge: regressing x0 on its previous value recovers the coefficient.
    ScenarioSpec lag_spec;
    lag_spec.feature_count = 2;
    lag_spec.lag_order = 1;
    lag_spec.true_intra = Eigen::MatrixXd::Zero(2, 2);
    lag_spec.true_lag = {Eigen::MatrixXd::Zero(2, 2)};
    lag_spec.true_lag[0](0, 0) = 0.7;
    lag_spec.noise_scale = 0.1;
    lag_spec.seed = 9;
    const GeneratedScenario lag_case = generate(lag_spec, 4, 500);
    const long n = lag_case.series.values.rows();
    const Eigen::VectorXd coeff = oracle::ols(lag_case.series.values.col(0).head(n - 1),
                                              lag_case.series.values.col(0).tail(n - 1));
    CHECK(coeff[0] == doctest::Approx(0.7).epsilon(0.08));
}

TEST_CASE("mean shifts move the signal but never the true structure") {
    ScenarioSpec spec = chain_spec();
    spec.episodes = {episode(3, 5, {1}, {PerturbationKind::mean_shift, 1.0, 1.0})};
    const GeneratedScenario s = generate(spec, 8, 50);

    for (int w = 0; w < 8; ++w) {
        CHECK((s.true_graphs[static_cast<std::size_t>(w)].intra - spec.true_intra)
                  .cwiseAbs()
                  .maxCoeff() == 0.0);
    }

    auto window_mean = [&](int w) {
        return s.series.values.col(1).segment(w * 50, 50).mean();
    };
    const double normal_mean = (window_mean(0) + window_mean(1) + window_mean(2)) / 3.0;
    const double attack_mean = (window_mean(3) + window_mean(4) + window_mean(5)) / 3.0;
    CHECK(attack_mean - normal_mean > 0.5);
}

TEST_CASE("weight scaling and rewiring change the per-window truth") {
    ScenarioSpec scaled = chain_spec();
    scaled.episodes = {episode(2, 3, {1}, {PerturbationKind::weight_scale, 0.0, 1.5})};
    const GeneratedScenario s = generate(scaled, 6, 10);
    CHECK(s.true_graphs[0].intra(0, 1) == 0.6);
    CHECK(s.true_graphs[2].intra(0, 1) == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(s.true_graphs[2].intra(1, 2) == 0.5);  // only incoming edges of node 1 scale

    ScenarioSpec rewired = chain_spec();
    rewired.episodes = {episode(2, 3, {2}, {PerturbationKind::edge_rewire, 0.0, 1.0})};
    const GeneratedScenario r = generate(rewired, 6, 10);
    CHECK(r.true_graphs[0].intra(1, 2) == 0.5);
    CHECK(r.true_graphs[2].intra(1, 2) == 0.0);   // old parent gone
    CHECK(r.true_graphs[2].intra(0, 2) == 1.5);   // distinctive replacement edge
    CHECK(is_acyclic(r.true_graphs[2].intra));
}

TEST_CASE("prior knowledge covers attacked nodes and their children") {
    const ScenarioSpec spec = default_scenario(7);
    const GeneratedScenario s = generate(spec, 60, 10);

    CHECK(s.prior.attack_nodes == std::set<std::string>{"x1", "x2", "x4", "x5"});
    CHECK(s.prior.impact_nodes == std::set<std::string>{"x3", "x6", "x7"});
}

TEST_CASE("the default scenario is stable and labels its three episodes") {
    const ScenarioSpec spec = default_scenario(42);
    CHECK(spec.feature_count == 8);
    CHECK_NOTHROW(spec.validate(60));

    const GeneratedScenario s = generate(spec, 60, 10);
    int positives = 0;
    for (const int label : s.window_labels) positives += label;
    CHECK(positives == 15);
    for (const int w : {8, 12, 25, 29, 46, 50}) {
        CHECK(s.window_labels[static_cast<std::size_t>(w)] == 1);
    }
    for (const int w : {0, 7, 13, 24, 30, 45, 51, 59}) {
        CHECK(s.window_labels[static_cast<std::size_t>(w)] == 0);
    }
}

TEST_CASE("random scenarios are valid, stable, acyclic and seeded") {
    for (const unsigned int seed : {1u, 2u, 3u, 4u}) {
        const ScenarioSpec spec = random_dag_scenario(6, 2, 0.5, seed);
        CHECK_NOTHROW(spec.validate(20));
        CHECK(is_acyclic(spec.true_intra));
        CHECK(lag_spectral_radius(spec.true_intra, spec.true_lag) < 0.95);
    }
    const ScenarioSpec a = random_dag_scenario(5, 1, 0.6, 12);
    const ScenarioSpec b = random_dag_scenario(5, 1, 0.6, 12);
    CHECK((a.true_intra - b.true_intra).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(random_dag_scenario(1, 1, 0.5, 1), std::invalid_argument);
    CHECK_THROWS_AS(random_dag_scenario(4, 1, 0.0, 1), std::invalid_argument);
}

TEST_CASE("long streams stay bounded for stable systems") {
    const ScenarioSpec spec = random_dag_scenario(6, 2, 0.6, 77);
    const GeneratedScenario s = generate(spec, 10, 100);
    CHECK(s.series.values.allFinite());
    CHECK(s.series.values.cwiseAbs().maxCoeff() < 50.0);
}
