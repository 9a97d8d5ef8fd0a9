#include "incadet/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace incadet::lbfgs {

namespace {

Eigen::VectorXd projected_gradient(const Eigen::VectorXd& x, const Eigen::VectorXd& g) {
    Eigen::VectorXd pg = g;
    for (long i = 0; i < x.size(); ++i) {
        if (x[i] <= 0.0 && g[i] > 0.0) pg[i] = 0.0;  // bound active, gradient points outward
    }
    return pg;
}

struct Memory {
    std::deque<Eigen::VectorXd> s;
    std::deque<Eigen::VectorXd> y;
    std::deque<double> rho;

    void push(const Eigen::VectorXd& si, const Eigen::VectorXd& yi, int capacity) {
        const double sy = si.dot(yi);
        if (sy <= 1e-12 * si.norm() * yi.norm()) return;  // curvature too weak
        s.push_back(si);
        y.push_back(yi);
        rho.push_back(1.0 / sy);
        while (static_cast<int>(s.size()) > capacity) {
            s.pop_front();
            y.pop_front();
            rho.pop_front();
        }
    }

    void clear() {
        s.clear();
        y.clear();
        rho.clear();
    }

    // Two-loop recursion: returns -H * g.
    Eigen::VectorXd direction(const Eigen::VectorXd& g) const {
        Eigen::VectorXd q = g;
        const int k = static_cast<int>(s.size());
        std::vector<double> alpha(static_cast<std::size_t>(k));
        for (int i = k - 1; i >= 0; --i) {
            alpha[static_cast<std::size_t>(i)] =
                rho[static_cast<std::size_t>(i)] * s[static_cast<std::size_t>(i)].dot(q);
            q -= alpha[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
        }
        if (k > 0) {
            const auto& sl = s[static_cast<std::size_t>(k - 1)];
            const auto& yl = y[static_cast<std::size_t>(k - 1)];
            q *= sl.dot(yl) / yl.squaredNorm();
        }
        for (int i = 0; i < k; ++i) {
            const double beta =
                rho[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)].dot(q);
            q += (alpha[static_cast<std::size_t>(i)] - beta) * s[static_cast<std::size_t>(i)];
        }
        return -q;
    }
};

}  // namespace

Result minimize_nonneg(const Objective& fg, Eigen::VectorXd x0, const Options& options) {
    Result result;
    Eigen::VectorXd x = x0.cwiseMax(0.0);
    Eigen::VectorXd g(x.size());
    double f = fg(x, g);

    Memory memory;
    int stalled = 0;

    for (int iter = 0; iter < options.max_iterations; ++iter) {
        result.iterations = iter;
        if (projected_gradient(x, g).lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
            result.converged = true;
            break;
        }

        Eigen::VectorXd d = memory.direction(g);
        if (d.dot(g) >= 0.0) {  // not a descent direction
            memory.clear();
            d = -g;
        }

        bool accepted = false;
        Eigen::VectorXd x_new, g_new(x.size());
        double f_new = f;
        for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
            double t = 1.0;
            for (int bt = 0; bt < options.max_backtracks; ++bt) {
                x_new = (x + t * d).cwiseMax(0.0);
                f_new = fg(x_new, g_new);
                const double decrease = g.dot(x_new - x);
                if (std::isfinite(f_new) && f_new <= f + 1e-4 * decrease && x_new != x) {
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if (!accepted && attempt == 0) {
                memory.clear();
                d = -g;  // retry along steepest descent
            }
        }
        if (!accepted) break;  // line search exhausted

        memory.push(x_new - x, g_new - g, options.memory);
        const double drop = f - f_new;
        x = std::move(x_new);
        g = g_new;
        f = f_new;

        if (drop <= options.f_tolerance * std::max(1.0, std::abs(f))) {
            if (++stalled >= 3) {
                result.converged = true;
                break;
            }
        } else {
            stalled = 0;
        }
    }

    result.x = std::move(x);
    result.f = f;
    return result;
}

}  // namespace incadet::lbfgs
