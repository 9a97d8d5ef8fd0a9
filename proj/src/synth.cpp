#include "incadet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

namespace incadet {

namespace {

std::vector<int> topological_order(const Eigen::MatrixXd& intra) {
    const long m = intra.rows();
    std::vector<int> indegree(static_cast<std::size_t>(m), 0);
    for (long i = 0; i < m; ++i) {
        for (long j = 0; j < m; ++j) {
            if (intra(i, j) != 0.0) ++indegree[static_cast<std::size_t>(j)];
        }
    }
    std::vector<int> order;
    std::vector<bool> placed(static_cast<std::size_t>(m), false);
    while (static_cast<long>(order.size()) < m) {
        int next = -1;
        for (long j = 0; j < m; ++j) {
            if (!placed[static_cast<std::size_t>(j)] && indegree[static_cast<std::size_t>(j)] == 0) {
                next = static_cast<int>(j);
                break;
            }
        }
        if (next < 0) throw std::invalid_argument("intra weights contain a cycle");
        placed[static_cast<std::size_t>(next)] = true;
        order.push_back(next);
        for (long j = 0; j < m; ++j) {
            if (intra(next, j) != 0.0) --indegree[static_cast<std::size_t>(j)];
        }
    }
    return order;
}

struct EffectiveSystem {
    Eigen::MatrixXd intra;
    std::vector<Eigen::MatrixXd> lags;
    Eigen::VectorXd shift;  // additive per-node offset
};

EffectiveSystem base_system(const ScenarioSpec& spec) {
    return {spec.true_intra, spec.true_lag,
            Eigen::VectorXd::Zero(spec.feature_count)};
}

// Builds the perturbed SEM for one episode. edge_rewire replaces each
// attacked node's intra parents with one earlier-in-topo-order node at a
// distinctive weight, which keeps the graph acyclic by construction.
EffectiveSystem episode_system(const ScenarioSpec& spec, const AttackEpisode& episode) {
    EffectiveSystem sys = base_system(spec);
    const long m = spec.feature_count;
    const std::set<int> attacked(episode.nodes.begin(), episode.nodes.end());

    switch (episode.perturbation.kind) {
        case PerturbationKind::mean_shift:
            for (const int v : episode.nodes) sys.shift[v] = episode.perturbation.delta;
            break;
        case PerturbationKind::weight_scale:
            for (const int v : episode.nodes) {
                sys.intra.col(v) *= episode.perturbation.gamma;
                for (Eigen::MatrixXd& block : sys.lags) block.col(v) *= episode.perturbation.gamma;
            }
            break;
        case PerturbationKind::edge_rewire: {
            const std::vector<int> order = topological_order(spec.true_intra);
            std::vector<int> pos(static_cast<std::size_t>(m), 0);
            for (std::size_t i = 0; i < order.size(); ++i) pos[static_cast<std::size_t>(order[i])] = static_cast<int>(i);
            for (const int v : episode.nodes) {
                sys.intra.col(v).setZero();
                int parent = -1;
                for (const int u : order) {
                    if (u != v && attacked.count(u) == 0 && pos[static_cast<std::size_t>(u)] < pos[static_cast<std::size_t>(v)]) {
                        parent = u;
                        break;
                    }
                }
                if (parent >= 0) {
                    sys.intra(parent, v) = 1.5;
                } else if (!sys.lags.empty()) {
                    sys.lags[0].col(v).setZero();
                    sys.lags[0]((v + 1) % m, v) = 1.5;
                }
            }
            break;
        }
    }
    return sys;
}

}  // namespace

std::vector<std::string> default_node_ids(int m) {
    std::vector<std::string> ids;
    ids.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) ids.push_back("x" + std::to_string(i));
    return ids;
}

double lag_spectral_radius(const Eigen::MatrixXd& intra,
                           const std::vector<Eigen::MatrixXd>& lags) {
    if (lags.empty()) return 0.0;
    const long m = intra.rows();
    const long p = static_cast<long>(lags.size());
    const Eigen::MatrixXd inv =
        (Eigen::MatrixXd::Identity(m, m) - intra.transpose()).inverse();

    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(m * p, m * p);
    for (long lag = 0; lag < p; ++lag) {
        companion.block(0, lag * m, m, m) = inv * lags[static_cast<std::size_t>(lag)].transpose();
    }
    if (p > 1) {
        companion.block(m, 0, m * (p - 1), m * (p - 1)) =
            Eigen::MatrixXd::Identity(m * (p - 1), m * (p - 1));
    }
    const Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

void ScenarioSpec::validate(int n_windows) const {
    const long m = feature_count;
    if (m < 2) throw std::invalid_argument("scenario needs at least 2 features");
    if (true_intra.rows() != m || true_intra.cols() != m) {
        throw std::invalid_argument("true_intra shape does not match feature_count");
    }
    if (static_cast<int>(true_lag.size()) != lag_order) {
        throw std::invalid_argument("true_lag block count does not match lag_order");
    }
    for (const Eigen::MatrixXd& block : true_lag) {
        if (block.rows() != m || block.cols() != m) {
            throw std::invalid_argument("lag block shape does not match feature_count");
        }
    }
    if (noise_scale <= 0.0) throw std::invalid_argument("noise_scale must be positive");
    if (!is_acyclic(true_intra)) throw std::invalid_argument("true_intra must be acyclic");

    std::vector<AttackEpisode> sorted = episodes;
    std::sort(sorted.begin(), sorted.end(),
              [](const AttackEpisode& a, const AttackEpisode& b) { return a.start_window < b.start_window; });
    int previous_end = -1;
    for (const AttackEpisode& e : sorted) {
        if (e.start_window < 0 || e.end_window < e.start_window || e.end_window >= n_windows) {
            throw std::invalid_argument("episode window range out of bounds");
        }
        if (e.start_window <= previous_end) throw std::invalid_argument("episodes overlap");
        previous_end = e.end_window;
        if (e.nodes.empty()) throw std::invalid_argument("episode attacks no nodes");
        for (const int v : e.nodes) {
            if (v < 0 || v >= m) throw std::invalid_argument("episode node index out of range");
        }
        if (e.perturbation.kind == PerturbationKind::weight_scale && e.perturbation.gamma <= 0.0) {
            throw std::invalid_argument("weight_scale gamma must be positive");
        }
    }

    auto check_stable = [](const EffectiveSystem& sys, const char* what) {
        const double radius = lag_spectral_radius(sys.intra, sys.lags);
        if (radius >= 0.95) {
            throw std::invalid_argument(std::string("unstable lag system (") + what +
                                        "): spectral radius " + std::to_string(radius));
        }
    };
    check_stable(base_system(*this), "base");
    for (const AttackEpisode& e : episodes) check_stable(episode_system(*this, e), "episode");
}

GeneratedScenario generate(const ScenarioSpec& spec, int n_windows, int k) {
    if (n_windows < 1 || k < 1) throw std::invalid_argument("need positive window count and length");
    spec.validate(n_windows);

    const long m = spec.feature_count;
    const int p = spec.lag_order;
    const std::vector<int> order = topological_order(spec.true_intra);

    // Per-window effective systems; -1 means the base system.
    std::vector<int> episode_of(static_cast<std::size_t>(n_windows), -1);
    std::vector<EffectiveSystem> systems;
    systems.push_back(base_system(spec));
    for (std::size_t e = 0; e < spec.episodes.size(); ++e) {
        systems.push_back(episode_system(spec, spec.episodes[e]));
        for (int w = spec.episodes[e].start_window; w <= spec.episodes[e].end_window; ++w) {
            episode_of[static_cast<std::size_t>(w)] = static_cast<int>(e);
        }
    }

    std::mt19937 rng(spec.seed);
    std::normal_distribution<double> noise(0.0, spec.noise_scale);

    std::vector<Eigen::VectorXd> history;  // most recent last
    for (int i = 0; i < std::max(p, 1); ++i) {
        Eigen::VectorXd row(m);
        for (long v = 0; v < m; ++v) row[v] = noise(rng);
        history.push_back(std::move(row));
    }

    auto next_row = [&](const EffectiveSystem& sys) {
        Eigen::VectorXd row = Eigen::VectorXd::Zero(m);
        for (const int v : order) {
            double value = noise(rng) + sys.shift[v];
            for (long u = 0; u < m; ++u) value += sys.intra(u, v) * row[u];
            for (int lag = 1; lag <= p; ++lag) {
                const Eigen::VectorXd& past = history[history.size() - static_cast<std::size_t>(lag)];
                for (long u = 0; u < m; ++u) {
                    value += sys.lags[static_cast<std::size_t>(lag - 1)](u, v) * past[u];
                }
            }
            row[v] = value;
        }
        history.push_back(row);
        if (history.size() > static_cast<std::size_t>(std::max(p, 1)) + 1) history.erase(history.begin());
        return row;
    };

    for (int burn = 0; burn < 50 + 20 * p; ++burn) next_row(systems[0]);

    GeneratedScenario out;
    const std::vector<std::string> ids = default_node_ids(static_cast<int>(m));
    out.series.schema.feature_names = ids;
    out.series.values.resize(static_cast<long>(n_windows) * k, m);
    out.series.row_labels.reserve(static_cast<std::size_t>(n_windows) * static_cast<std::size_t>(k));

    for (int w = 0; w < n_windows; ++w) {
        const int e = episode_of[static_cast<std::size_t>(w)];
        const EffectiveSystem& sys = systems[static_cast<std::size_t>(e + 1)];
        for (int r = 0; r < k; ++r) {
            out.series.values.row(static_cast<long>(w) * k + r) = next_row(sys).transpose();
            out.series.row_labels.push_back(e >= 0 ? 1 : 0);
        }
        out.window_labels.push_back(e >= 0 ? 1 : 0);

        CausalGraph truth = CausalGraph::empty(ids, p);
        truth.intra = sys.intra;
        for (int lag = 0; lag < p; ++lag) truth.lags[static_cast<std::size_t>(lag)] = sys.lags[static_cast<std::size_t>(lag)];
        out.true_graphs.push_back(std::move(truth));
    }

    // Prior knowledge: attacked nodes plus their direct children in the
    // base structure.
    std::set<int> attacked;
    for (const AttackEpisode& e : spec.episodes) attacked.insert(e.nodes.begin(), e.nodes.end());
    for (const int u : attacked) {
        out.prior.attack_nodes.insert(ids[static_cast<std::size_t>(u)]);
        for (long v = 0; v < m; ++v) {
            if (spec.true_intra(u, v) != 0.0 && attacked.count(static_cast<int>(v)) == 0) {
                out.prior.impact_nodes.insert(ids[static_cast<std::size_t>(v)]);
            }
        }
    }
    return out;
}

ScenarioSpec default_scenario(unsigned int seed) {
    ScenarioSpec spec;
    spec.feature_count = 8;
    spec.lag_order = 1;
    spec.noise_scale = 0.1;
    spec.seed = seed;

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(8, 8);
    a(0, 1) = 0.8;
    a(0, 2) = -0.6;
    a(1, 3) = 0.7;
    a(2, 3) = 0.5;
    a(3, 4) = 0.6;
    a(2, 5) = -0.7;
    a(5, 6) = 0.6;
    a(4, 7) = 0.5;
    a(6, 7) = -0.5;
    spec.true_intra = a;
    spec.true_lag = {Eigen::MatrixXd::Identity(8, 8) * 0.3};

    AttackEpisode shift;
    shift.start_window = 8;
    shift.end_window = 12;
    shift.nodes = {1, 2};
    shift.perturbation = {PerturbationKind::mean_shift, 5.0 * spec.noise_scale, 1.0};

    AttackEpisode rewire_train;
    rewire_train.start_window = 25;
    rewire_train.end_window = 29;
    rewire_train.nodes = {4, 5};
    rewire_train.perturbation = {PerturbationKind::edge_rewire, 0.0, 1.0};

    AttackEpisode rewire_test = rewire_train;
    rewire_test.start_window = 46;
    rewire_test.end_window = 50;

    spec.episodes = {shift, rewire_train, rewire_test};
    return spec;
}

ScenarioSpec random_dag_scenario(int m, int p, double density, unsigned int seed) {
    if (m < 2 || p < 0) throw std::invalid_argument("bad scenario dimensions");
    if (density <= 0.0 || density > 1.0) throw std::invalid_argument("density must lie in (0,1]");

    std::mt19937 rng(seed);
    std::vector<int> order(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) order[static_cast<std::size_t>(i)] = i;
    std::shuffle(order.begin(), order.end(), rng);

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> intra_w(0.4, 0.8);
    std::uniform_real_distribution<double> lag_w(0.1, 0.3);
    auto signed_draw = [&](std::uniform_real_distribution<double>& dist) {
        return (unit(rng) < 0.5 ? -1.0 : 1.0) * dist(rng);
    };

    ScenarioSpec spec;
    spec.feature_count = m;
    spec.lag_order = p;
    spec.seed = seed;
    spec.true_intra = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            if (unit(rng) < density) {
                spec.true_intra(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]) =
                    signed_draw(intra_w);
            }
        }
    }
    for (int lag = 0; lag < p; ++lag) {
        Eigen::MatrixXd block = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) {
                if (unit(rng) < 0.5 * density) block(i, j) = signed_draw(lag_w);
            }
        }
        spec.true_lag.push_back(std::move(block));
    }
    while (lag_spectral_radius(spec.true_intra, spec.true_lag) >= 0.95) {
        for (Eigen::MatrixXd& block : spec.true_lag) block *= 0.8;
    }
    return spec;
}

}  // namespace incadet
