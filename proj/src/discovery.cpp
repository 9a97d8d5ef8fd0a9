#include "incadet/discovery.hpp"

#include "incadet/lbfgs.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace incadet {

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> stack_lags(const Eigen::MatrixXd& window, int max_lag) {
    const long k = window.rows();
    const long m = window.cols();
    if (max_lag < 0) throw std::invalid_argument("max_lag must be non-negative");
    if (k - max_lag < 2) throw std::invalid_argument("max_lag too large for window length");

    const long rows = k - max_lag;
    Eigen::MatrixXd x = window.bottomRows(rows);
    Eigen::MatrixXd t(rows, max_lag * m);
    for (long r = 0; r < rows; ++r) {
        for (int lag = 1; lag <= max_lag; ++lag) {
            t.block(r, (lag - 1) * m, 1, m) = window.row(r + max_lag - lag);
        }
    }
    return {std::move(x), std::move(t)};
}

double acyclicity_value(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("matrix must be square");
    const Eigen::MatrixXd e = a.cwiseProduct(a).exp();
    return e.trace() - static_cast<double>(a.rows());
}

Eigen::MatrixXd acyclicity_gradient(const Eigen::MatrixXd& a) {
    const Eigen::MatrixXd e = a.cwiseProduct(a).exp();
    return e.transpose().cwiseProduct(2.0 * a);
}

namespace {

// Doubled non-negative parametrization: W = W+ - W- turns the l1 penalty
// into a linear term over x >= 0, so the inner problem is smooth.
struct SemProblem {
    long m = 0;       // variables
    long pcols = 0;   // p * m lag columns
    Eigen::MatrixXd sxx, sxt, stt;  // Gram matrices, 1/n folded in
    double l1_intra = 0.0;
    double l1_lag = 0.0;

    long a_size() const { return m * m; }
    long b_size() const { return pcols * m; }
    long var_count() const { return 2 * (a_size() + b_size()); }

    void unpack(const Eigen::VectorXd& x, Eigen::MatrixXd& a, Eigen::MatrixXd& b) const {
        const auto ax_pos = Eigen::Map<const Eigen::MatrixXd>(x.data(), m, m);
        const auto ax_neg = Eigen::Map<const Eigen::MatrixXd>(x.data() + a_size(), m, m);
        a = ax_pos - ax_neg;
        a.diagonal().setZero();
        const auto bt_pos =
            Eigen::Map<const Eigen::MatrixXd>(x.data() + 2 * a_size(), pcols, m);
        const auto bt_neg =
            Eigen::Map<const Eigen::MatrixXd>(x.data() + 2 * a_size() + b_size(), pcols, m);
        b = bt_pos - bt_neg;
    }

    // Mean squared residual (1/2n)||X - XA - TB||_F^2 in Gram form; fills
    // the gradients with respect to A and B.
    double loss(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                Eigen::MatrixXd& grad_a, Eigen::MatrixXd& grad_b) const {
        const Eigen::MatrixXd ra = sxx - sxx * a - sxt * b;            // Xt R / n
        const Eigen::MatrixXd rb = sxt.transpose() - sxt.transpose() * a - stt * b;  // Tt R / n
        grad_a = -ra;
        grad_b = -rb;
        const double value = 0.5 * (sxx.trace() - 2.0 * (sxx.cwiseProduct(a)).sum() -
                                    2.0 * (sxt.transpose().cwiseProduct(b)).sum() +
                                    (a.cwiseProduct(sxx * a)).sum() +
                                    2.0 * (a.cwiseProduct(sxt * b)).sum() +
                                    (b.cwiseProduct(stt * b)).sum());
        return value;
    }

    // Augmented-Lagrangian objective over the doubled variables.
    double objective(const Eigen::VectorXd& x, Eigen::VectorXd& grad,
                     double rho, double alpha) const {
        Eigen::MatrixXd a, b, grad_a, grad_b;
        unpack(x, a, b);
        double value = loss(a, b, grad_a, grad_b);

        const double h = acyclicity_value(a);
        value += 0.5 * rho * h * h + alpha * h;
        grad_a += (rho * h + alpha) * acyclicity_gradient(a);
        grad_a.diagonal().setZero();

        value += l1_intra * x.segment(0, 2 * a_size()).sum();
        value += l1_lag * x.segment(2 * a_size(), 2 * b_size()).sum();

        grad.resize(x.size());
        Eigen::Map<Eigen::MatrixXd>(grad.data(), m, m) =
            grad_a + Eigen::MatrixXd::Constant(m, m, l1_intra);
        Eigen::Map<Eigen::MatrixXd>(grad.data() + a_size(), m, m) =
            -grad_a + Eigen::MatrixXd::Constant(m, m, l1_intra);
        Eigen::Map<Eigen::MatrixXd>(grad.data() + 2 * a_size(), pcols, m) =
            grad_b + Eigen::MatrixXd::Constant(pcols, m, l1_lag);
        Eigen::Map<Eigen::MatrixXd>(grad.data() + 2 * a_size() + b_size(), pcols, m) =
            -grad_b + Eigen::MatrixXd::Constant(pcols, m, l1_lag);
        return value;
    }
};

}  // namespace

CausalGraph fit(const Eigen::MatrixXd& x, const Eigen::MatrixXd& t,
                std::vector<std::string> node_ids, const DiscoveryConfig& config) {
    const long n = x.rows();
    const long m = x.cols();
    if (n < 2) throw std::invalid_argument("need at least 2 samples to fit");
    if (static_cast<long>(node_ids.size()) != m) {
        throw std::invalid_argument("node_ids size does not match column count");
    }
    if (!x.allFinite() || !t.allFinite()) {
        throw std::invalid_argument("non-finite values in fit input");
    }
    if (t.rows() != 0 && t.rows() != n) {
        throw std::invalid_argument("X and T row counts differ");
    }
    if (t.cols() % std::max<long>(m, 1) != 0) {
        throw std::invalid_argument("lag column count is not a multiple of M");
    }

    SemProblem problem;
    problem.m = m;
    problem.pcols = t.cols();
    problem.l1_intra = config.l1_intra;
    problem.l1_lag = config.l1_lag;
    const double inv_n = 1.0 / static_cast<double>(n);
    problem.sxx = (x.transpose() * x) * inv_n;
    problem.sxt = (x.transpose() * t) * inv_n;
    problem.stt = (t.transpose() * t) * inv_n;

    lbfgs::Options inner;
    inner.max_iterations = config.max_inner_iterations;
    inner.gradient_tolerance = config.inner_gradient_tolerance;

    Eigen::VectorXd vars = Eigen::VectorXd::Zero(problem.var_count());
    double rho = config.rho_initial;
    double alpha = 0.0;
    double h = std::numeric_limits<double>::infinity();
    int outer_used = 0;

    for (int outer = 0; outer < config.max_outer_iterations; ++outer) {
        Eigen::VectorXd solution = vars;
        double h_new = h;
        while (true) {
            auto fg = [&](const Eigen::VectorXd& v, Eigen::VectorXd& g) {
                return problem.objective(v, g, rho, alpha);
            };
            solution = lbfgs::minimize_nonneg(fg, vars, inner).x;
            Eigen::MatrixXd a, b;
            problem.unpack(solution, a, b);
            h_new = acyclicity_value(a);
            if (h_new > 0.25 * h && rho < config.rho_max) {
                rho *= 10.0;
            } else {
                break;
            }
        }
        vars = solution;
        h = h_new;
        alpha += rho * h;
        outer_used = outer + 1;
        if (h <= config.acyclicity_tolerance || rho >= config.rho_max) break;
    }

    Eigen::MatrixXd a, b;
    problem.unpack(vars, a, b);

    const int p = problem.pcols == 0 ? 0 : static_cast<int>(problem.pcols / m);
    CausalGraph graph = CausalGraph::empty(std::move(node_ids), p);
    graph.intra = a;
    for (int lag = 0; lag < p; ++lag) {
        graph.lags[static_cast<std::size_t>(lag)] = b.middleRows(lag * m, m);
    }
    graph.apply_threshold(config.edge_threshold);

    // The smooth constraint leaves numerically tiny cycles at worst; after
    // thresholding, drop the weakest edge on any remaining cycle.
    int removed = 0;
    while (true) {
        const std::vector<int> cycle = find_cycle(graph.intra);
        if (cycle.empty()) break;
        int best_i = -1, best_j = -1;
        double best_w = std::numeric_limits<double>::infinity();
        for (std::size_t idx = 0; idx < cycle.size(); ++idx) {
            const int i = cycle[idx];
            const int j = cycle[(idx + 1) % cycle.size()];
            const double w = std::abs(graph.intra(i, j));
            if (w < best_w) {
                best_w = w;
                best_i = i;
                best_j = j;
            }
        }
        graph.intra(best_i, best_j) = 0.0;
        ++removed;
    }

    graph.fit_info.acyclicity = acyclicity_value(graph.intra);
    graph.fit_info.outer_iterations = outer_used;
    graph.fit_info.converged = (h <= config.acyclicity_tolerance);
    graph.fit_info.edges_removed_for_acyclicity = removed;
    return graph;
}

CausalGraph fit_window(const Eigen::MatrixXd& window, int max_lag,
                       std::vector<std::string> node_ids, const DiscoveryConfig& config) {
    auto [x, t] = stack_lags(window, max_lag);
    return fit(x, t, std::move(node_ids), config);
}

}  // namespace incadet
