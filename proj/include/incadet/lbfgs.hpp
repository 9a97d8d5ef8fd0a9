#pragma once

#include <Eigen/Dense>

#include <functional>

namespace incadet::lbfgs {

struct Options {
    int max_iterations = 500;
    int memory = 10;
    double gradient_tolerance = 1e-6;  // sup-norm of the projected gradient
    double f_tolerance = 1e-10;        // relative objective decrease
    int max_backtracks = 40;
};

struct Result {
    Eigen::VectorXd x;
    double f = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Objective callback: fills the gradient and returns the value.
using Objective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

/// Limited-memory BFGS over the non-negative orthant. Iterates are kept
/// feasible by projection and the line search uses a projection-aware Armijo
/// condition; when the quasi-Newton direction stalls the memory is dropped
/// and a projected gradient step is tried before giving up.
Result minimize_nonneg(const Objective& fg, Eigen::VectorXd x0, const Options& options = {});

}  // namespace incadet::lbfgs
