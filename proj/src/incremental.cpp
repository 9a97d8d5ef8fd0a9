#include "incadet/incremental.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "incadet/histogram.hpp"

namespace incadet {

LaplacianView laplacian(const CausalGraph& graph) {
    const Eigen::MatrixXd abs_w = graph.intra.cwiseAbs();
    const Eigen::MatrixXd a_sym = 0.5 * (abs_w + abs_w.transpose());
    const Eigen::VectorXd degrees = a_sym.rowwise().sum();

    LaplacianView view;
    view.degree = degrees.asDiagonal();
    view.laplacian = view.degree - a_sym;

    Eigen::VectorXd inv_sqrt(degrees.size());
    for (Eigen::Index i = 0; i < degrees.size(); ++i) {
        inv_sqrt[i] = degrees[i] > 0.0 ? 1.0 / std::sqrt(degrees[i]) : 0.0;
    }
    view.normalized = inv_sqrt.asDiagonal() * view.laplacian * inv_sqrt.asDiagonal();
    return view;
}

CausalGraph extract_attack_subgraph(const CausalGraph& graph, const PriorKnowledge& prior) {
    if (prior.empty()) throw std::invalid_argument("attack subgraph needs non-empty prior knowledge");
    const std::set<std::string> domain = prior.all();

    const long m = graph.node_count();
    std::vector<bool> in_domain(static_cast<std::size_t>(m), false);
    for (long i = 0; i < m; ++i) {
        in_domain[static_cast<std::size_t>(i)] =
            domain.count(graph.node_ids[static_cast<std::size_t>(i)]) > 0;
    }

    CausalGraph sub = CausalGraph::empty(graph.node_ids, 0);
    sub.edge_threshold = graph.edge_threshold;
    for (long i = 0; i < m; ++i) {
        if (!in_domain[static_cast<std::size_t>(i)]) continue;
        for (long j = 0; j < m; ++j) {
            if (in_domain[static_cast<std::size_t>(j)]) sub.intra(i, j) = graph.intra(i, j);
        }
    }
    return sub;
}

void buffer_update(ReplayBuffer& buffer, const CausalGraph& subgraph) {
    for (const GraphEdge& e : subgraph.edges()) {
        if (e.lag == 0) {
            buffer.upsert(subgraph.node_ids[static_cast<std::size_t>(e.src)],
                          subgraph.node_ids[static_cast<std::size_t>(e.dst)], e.weight);
        }
    }
}

namespace {

double capped(double weight, double cap) {
    const double magnitude = std::min(std::abs(weight), cap);
    return std::copysign(magnitude, weight);
}

}  // namespace

ReinforcementResult causal_edge_reinforcement(const CausalGraph& next_graph,
                                              const ReplayBuffer& buffer, double omega,
                                              double weight_cap) {
    if (omega <= 1.0) throw std::invalid_argument("reinforcement factor must exceed 1");
    ReinforcementResult result;
    result.graph = next_graph;
    for (const BufferEntry& entry : buffer.entries()) {
        // index_of rejects buffered edges touching nodes outside the schema
        const int i = result.graph.index_of(entry.src);
        const int j = result.graph.index_of(entry.dst);
        if (result.graph.intra(i, j) != 0.0) {
            result.graph.intra(i, j) = capped(entry.weight * omega, weight_cap);
            ++result.reinforced;
        } else {
            result.graph.intra(i, j) = capped(entry.weight, weight_cap);
            ++result.inserted;
        }
    }
    return result;
}

CycleRemovalResult remove_cycles_protected(const CausalGraph& graph,
                                           const std::set<std::string>& protected_nodes) {
    CycleRemovalResult result;
    result.graph = graph;

    std::vector<bool> is_protected(graph.node_ids.size(), false);
    for (std::size_t i = 0; i < graph.node_ids.size(); ++i) {
        is_protected[i] = protected_nodes.count(graph.node_ids[i]) > 0;
    }

    while (true) {
        const std::vector<int> cycle = find_cycle(result.graph.intra);
        if (cycle.empty()) break;

        using Candidate = std::tuple<double, int, int>;  // (|w|, src, dst)
        std::vector<Candidate> open, all;
        for (std::size_t idx = 0; idx < cycle.size(); ++idx) {
            const int i = cycle[idx];
            const int j = cycle[(idx + 1) % cycle.size()];
            const Candidate c{std::abs(result.graph.intra(i, j)), i, j};
            all.push_back(c);
            if (!is_protected[static_cast<std::size_t>(i)]) open.push_back(c);
        }
        const bool forced = open.empty();
        const auto& pool = forced ? all : open;
        const auto [w, i, j] = *std::min_element(pool.begin(), pool.end());
        result.graph.intra(i, j) = 0.0;
        ++result.removed;
        if (forced) ++result.removed_protected;
    }
    return result;
}

StoppingResult stopping_score(const CausalGraph& subgraph_prev, const CausalGraph& subgraph_next,
                              const PriorKnowledge& prior, int bins, double outdegree_range,
                              double stop_threshold) {
    if (!subgraph_prev.same_nodes(subgraph_next)) {
        throw std::invalid_argument("stopping comparison requires identical node sets");
    }
    auto outdegrees = [&](const CausalGraph& g) {
        std::vector<double> values;
        for (const std::string& name : prior.all()) {
            values.push_back(g.intra.row(g.index_of(name)).cwiseAbs().sum());
        }
        return values;
    };
    const Histogram hp = value_histogram(outdegrees(subgraph_prev), bins, 0.0, outdegree_range);
    const Histogram hn = value_histogram(outdegrees(subgraph_next), bins, 0.0, outdegree_range);

    StoppingResult result;
    result.divergence = js_divergence(hp, hn);
    result.similarity = 1.0 - result.divergence;
    result.converged = result.divergence < stop_threshold;
    return result;
}

IncrementalState IncrementalState::initial(std::vector<std::string> node_ids, int lag_order,
                                           std::optional<std::size_t> buffer_capacity) {
    IncrementalState state;
    state.attack_graph = CausalGraph::empty(node_ids, lag_order);
    state.normal_graph = CausalGraph::empty(std::move(node_ids), lag_order);
    state.buffer = ReplayBuffer(buffer_capacity);
    return state;
}

void begin_attack(IncrementalState& state, const CausalGraph& trigger_graph) {
    state.attack_graph = trigger_graph;
    state.previous_subgraph.reset();
    state.converged = false;
}

StepDiagnostics incremental_step(IncrementalState& state, const CausalGraph& new_window_graph,
                                 const PriorKnowledge& prior, SystemStatus status,
                                 const IncrementalConfig& config) {
    StepDiagnostics diag;

    if (status == SystemStatus::attack) {
        const CausalGraph current_sub = extract_attack_subgraph(state.attack_graph, prior);
        if (config.use_buffer) buffer_update(state.buffer, current_sub);

        ReinforcementResult reinforced;
        if (config.use_cer) {
            reinforced = causal_edge_reinforcement(new_window_graph, state.buffer,
                                                   config.reinforcement, config.weight_cap);
        } else {
            reinforced.graph = new_window_graph;
        }
        const CycleRemovalResult acyclic =
            remove_cycles_protected(reinforced.graph, prior.attack_nodes);

        const CausalGraph raw_sub = extract_attack_subgraph(new_window_graph, prior);
        if (state.previous_subgraph) {
            const StoppingResult stop =
                stopping_score(*state.previous_subgraph, raw_sub, prior, config.histogram_bins,
                               config.outdegree_range, config.stop_threshold);
            diag.divergence = stop.divergence;
            diag.similarity = stop.similarity;
            diag.converged = stop.converged;
            state.converged = stop.converged;
        } else {
            state.converged = false;
        }

        state.attack_graph = acyclic.graph;
        state.previous_subgraph = raw_sub;
        diag.reinforced_edges = reinforced.reinforced;
        diag.inserted_edges = reinforced.inserted;
        diag.removed_cycle_edges = acyclic.removed;
    } else {
        // Normal status: keep only structure away from the prior nodes, so
        // the normal graph stays clearly distinct from the attack graph.
        const std::set<std::string> domain = prior.all();
        CausalGraph normal = new_window_graph;
        const long m = normal.node_count();
        std::vector<bool> in_domain(static_cast<std::size_t>(m), false);
        for (long i = 0; i < m; ++i) {
            in_domain[static_cast<std::size_t>(i)] =
                domain.count(normal.node_ids[static_cast<std::size_t>(i)]) > 0;
        }
        for (long i = 0; i < m; ++i) {
            for (long j = 0; j < m; ++j) {
                if (in_domain[static_cast<std::size_t>(i)] || in_domain[static_cast<std::size_t>(j)]) {
                    normal.intra(i, j) = 0.0;
                    for (Eigen::MatrixXd& block : normal.lags) block(i, j) = 0.0;
                }
            }
        }
        state.normal_graph = std::move(normal);
    }

    diag.attack_edge_count = static_cast<int>(state.attack_graph.edge_count());
    diag.normal_edge_count = static_cast<int>(state.normal_graph.edge_count());
    diag.buffer_size = static_cast<int>(state.buffer.size());
    return diag;
}

}  // namespace incadet
