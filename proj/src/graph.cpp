#include "incadet/graph.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace incadet {

CausalGraph CausalGraph::empty(std::vector<std::string> ids, int lag_order) {
    CausalGraph g;
    const long m = static_cast<long>(ids.size());
    g.node_ids = std::move(ids);
    g.intra = Eigen::MatrixXd::Zero(m, m);
    g.lags.assign(static_cast<std::size_t>(lag_order), Eigen::MatrixXd::Zero(m, m));
    return g;
}

std::vector<GraphEdge> CausalGraph::edges() const {
    std::vector<GraphEdge> out;
    const int m = node_count();
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            if (intra(i, j) != 0.0) out.push_back({i, j, 0, intra(i, j)});
        }
    }
    for (int l = 0; l < lag_order(); ++l) {
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) {
                if (lags[static_cast<std::size_t>(l)](i, j) != 0.0) {
                    out.push_back({i, j, l + 1, lags[static_cast<std::size_t>(l)](i, j)});
                }
            }
        }
    }
    return out;
}

int CausalGraph::edge_count() const {
    int count = static_cast<int>((intra.array() != 0.0).count());
    for (const auto& block : lags) {
        count += static_cast<int>((block.array() != 0.0).count());
    }
    return count;
}

void CausalGraph::apply_threshold(double threshold) {
    edge_threshold = threshold;
    auto clip = [threshold](Eigen::MatrixXd& m) {
        m = (m.array().abs() < threshold).select(0.0, m);
    };
    clip(intra);
    for (auto& block : lags) clip(block);
}

int CausalGraph::index_of(const std::string& node) const {
    auto it = std::find(node_ids.begin(), node_ids.end(), node);
    if (it == node_ids.end()) {
        throw std::invalid_argument("unknown node id: " + node);
    }
    return static_cast<int>(it - node_ids.begin());
}

void CausalGraph::validate() const {
    const long m = node_count();
    if (intra.rows() != m || intra.cols() != m) {
        throw std::invalid_argument("intra adjacency shape mismatch");
    }
    for (const auto& block : lags) {
        if (block.rows() != m || block.cols() != m) {
            throw std::invalid_argument("lag adjacency shape mismatch");
        }
        if (!block.allFinite()) throw std::invalid_argument("non-finite lag weight");
    }
    if (!intra.allFinite()) throw std::invalid_argument("non-finite intra weight");
    for (long i = 0; i < m; ++i) {
        if (intra(i, i) != 0.0) throw std::invalid_argument("intra diagonal must be zero");
    }
}

namespace {

// Iterative DFS; colors: 0 unvisited, 1 on stack, 2 done.
struct CycleSearch {
    const Eigen::MatrixXd& adj;
    std::vector<int> color;
    std::vector<int> parent;
    std::vector<int> cycle;

    explicit CycleSearch(const Eigen::MatrixXd& a)
        : adj(a), color(static_cast<std::size_t>(a.rows()), 0),
          parent(static_cast<std::size_t>(a.rows()), -1) {}

    bool visit(int u) {
        color[static_cast<std::size_t>(u)] = 1;
        for (int v = 0; v < adj.cols(); ++v) {
            if (adj(u, v) == 0.0) continue;
            if (color[static_cast<std::size_t>(v)] == 1) {
                // Back edge u -> v closes a cycle v -> ... -> u -> v.
                cycle.clear();
                int w = u;
                while (w != v) {
                    cycle.push_back(w);
                    w = parent[static_cast<std::size_t>(w)];
                }
                cycle.push_back(v);
                std::reverse(cycle.begin(), cycle.end());
                return true;
            }
            if (color[static_cast<std::size_t>(v)] == 0) {
                parent[static_cast<std::size_t>(v)] = u;
                if (visit(v)) return true;
            }
        }
        color[static_cast<std::size_t>(u)] = 2;
        return false;
    }
};

}  // namespace

std::vector<int> find_cycle(const Eigen::MatrixXd& adjacency) {
    if (adjacency.rows() != adjacency.cols()) {
        throw std::invalid_argument("adjacency must be square");
    }
    CycleSearch search(adjacency);
    for (int u = 0; u < adjacency.rows(); ++u) {
        if (search.color[static_cast<std::size_t>(u)] == 0 && search.visit(u)) {
            return search.cycle;
        }
    }
    return {};
}

bool is_acyclic(const Eigen::MatrixXd& adjacency) {
    return find_cycle(adjacency).empty();
}

std::string graph_to_json(const CausalGraph& graph) {
    nlohmann::json j;
    j["node_ids"] = graph.node_ids;
    j["lag_order"] = graph.lag_order();
    j["edge_threshold"] = graph.edge_threshold;
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : graph.edges()) {
        edges.push_back({{"src", graph.node_ids[static_cast<std::size_t>(e.src)]},
                         {"dst", graph.node_ids[static_cast<std::size_t>(e.dst)]},
                         {"lag", e.lag},
                         {"weight", e.weight}});
    }
    j["edges"] = std::move(edges);
    j["fit"] = {{"acyclicity", graph.fit_info.acyclicity},
                {"outer_iterations", graph.fit_info.outer_iterations},
                {"converged", graph.fit_info.converged},
                {"edges_removed_for_acyclicity", graph.fit_info.edges_removed_for_acyclicity}};
    return j.dump(2);
}

CausalGraph graph_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    CausalGraph g = CausalGraph::empty(j.at("node_ids").get<std::vector<std::string>>(),
                                       j.at("lag_order").get<int>());
    g.edge_threshold = j.at("edge_threshold").get<double>();
    for (const auto& e : j.at("edges")) {
        const int src = g.index_of(e.at("src").get<std::string>());
        const int dst = g.index_of(e.at("dst").get<std::string>());
        const int lag = e.at("lag").get<int>();
        const double weight = e.at("weight").get<double>();
        if (lag == 0) {
            g.intra(src, dst) = weight;
        } else if (lag >= 1 && lag <= g.lag_order()) {
            g.lags[static_cast<std::size_t>(lag - 1)](src, dst) = weight;
        } else {
            throw std::invalid_argument("edge lag out of range in graph JSON");
        }
    }
    if (j.contains("fit")) {
        const auto& f = j.at("fit");
        g.fit_info.acyclicity = f.at("acyclicity").get<double>();
        g.fit_info.outer_iterations = f.at("outer_iterations").get<int>();
        g.fit_info.converged = f.at("converged").get<bool>();
        g.fit_info.edges_removed_for_acyclicity = f.at("edges_removed_for_acyclicity").get<int>();
    }
    return g;
}

}  // namespace incadet
