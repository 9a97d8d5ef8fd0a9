#pragma once

#include "incadet/graph.hpp"

#include <Eigen/Dense>

#include <string>
#include <utility>
#include <vector>

namespace incadet {

struct LagSpec {
    int max_lag = 0;  // p >= 0
};

struct DiscoveryConfig {
    double l1_intra = 0.1;            // lambda on A_X
    double l1_lag = 0.1;              // lambda on A_T
    double edge_threshold = 0.1;
    int max_outer_iterations = 100;   // augmented Lagrangian rounds
    double acyclicity_tolerance = 1e-8;

    // Inner solver and penalty schedule.
    int max_inner_iterations = 400;
    double inner_gradient_tolerance = 1e-6;
    double rho_initial = 1.0;
    double rho_max = 1e16;
};

/// Builds the lagged design matrices from a k x M window: X holds rows
/// p..k-1 and row r of T is the concatenation of the rows at lags 1..p
/// relative to X's row r. With p = 0, T has zero columns.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> stack_lags(const Eigen::MatrixXd& window, int max_lag);

/// Smooth acyclicity surrogate h(A) = trace(exp(A o A)) - M; zero exactly
/// when the weighted digraph has no directed cycle.
double acyclicity_value(const Eigen::MatrixXd& a);

/// Gradient of the surrogate: exp(A o A)^T o 2A.
Eigen::MatrixXd acyclicity_gradient(const Eigen::MatrixXd& a);

/// Learns the linear SEM  X = X A_X + T A_T + Z  by minimizing the mean
/// squared residual plus l1 penalties, subject to acyclicity of A_X. Entries
/// below the edge threshold are zeroed afterwards; the thresholded intra
/// graph is guaranteed acyclic (weakest edges are dropped if the smooth
/// constraint left any residual cycle, and the fallback count is recorded).
CausalGraph fit(const Eigen::MatrixXd& x, const Eigen::MatrixXd& t,
                std::vector<std::string> node_ids, const DiscoveryConfig& config);

/// stack_lags + fit in one call.
CausalGraph fit_window(const Eigen::MatrixXd& window, int max_lag,
                       std::vector<std::string> node_ids, const DiscoveryConfig& config);

}  // namespace incadet
