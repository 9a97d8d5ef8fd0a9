#pragma once

#include "incadet/graph.hpp"
#include "incadet/series.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace incadet {

enum class PerturbationKind { edge_rewire, mean_shift, weight_scale };

struct Perturbation {
    PerturbationKind kind = PerturbationKind::mean_shift;
    double delta = 0.0;  // additive shift for mean_shift
    double gamma = 1.0;  // incoming-weight multiplier for weight_scale
};

struct AttackEpisode {
    int start_window = 0;
    int end_window = 0;  // inclusive
    std::vector<int> nodes;
    Perturbation perturbation;
};

// Linear SEM stream spec: x_t = A_X^T x_t + sum_l A_{T,l}^T x_{t-l} + eps,
// solved in topological order of the acyclic intra graph.
struct ScenarioSpec {
    int feature_count = 0;
    int lag_order = 0;
    Eigen::MatrixXd true_intra;
    std::vector<Eigen::MatrixXd> true_lag;
    double noise_scale = 0.1;
    std::vector<AttackEpisode> episodes;
    unsigned int seed = 7;

    // Throws on cyclic intra weights, overlapping or out-of-range episodes,
    // or an unstable lag system (companion spectral radius >= 0.95), for the
    // base system and for every episode's perturbed system.
    void validate(int n_windows) const;
};

struct GeneratedScenario {
    RawSeries series;                      // row labels 1 inside episodes
    std::vector<int> window_labels;
    std::vector<CausalGraph> true_graphs;  // effective structure per window
    PriorKnowledge prior;                  // attacked nodes + their children
};

std::vector<std::string> default_node_ids(int m);

// Spectral radius of the companion matrix of the reduced lag system.
double lag_spectral_radius(const Eigen::MatrixXd& intra,
                           const std::vector<Eigen::MatrixXd>& lags);

GeneratedScenario generate(const ScenarioSpec& spec, int n_windows, int k);

// Hand-crafted stable 8-node spec with three episode slots used by the CLI
// and the end-to-end evaluation.
ScenarioSpec default_scenario(unsigned int seed);

// Random stable DAG spec for property tests: intra density in (0,1],
// |weights| in [0.4, 0.8], lag blocks damped until stable.
ScenarioSpec random_dag_scenario(int m, int p, double density, unsigned int seed);

}  // namespace incadet
