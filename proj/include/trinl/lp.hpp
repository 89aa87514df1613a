#pragma once

// Dense phase-one simplex for small feasibility problems
//   find w >= 0 with A w = b.
// Dantzig pricing, switching to Bland's rule after a run of degenerate pivots.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <vector>

namespace trinl::lp {

enum class Status { Feasible, Infeasible, NumericalFailure };

struct FeasibilityResult {
    Status status = Status::NumericalFailure;
    Eigen::VectorXd w;           // a basic feasible point when status == Feasible
    double infeasibility = 0.0;  // phase-one optimum (sum of artificials)
    double residual = 0.0;       // max |A w - b| of the returned point
    int pivots = 0;
};

struct Options {
    double pivot_tol = 1e-11;
    double feasibility_tol = 1e-9;  // phase-one optimum below this counts as feasible
    double residual_tol = 1e-8;
    int max_pivots = 200000;
    int degenerate_run_before_bland = 50;
};

inline FeasibilityResult find_feasible_point(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                             const Options& opt = {}) {
    const Eigen::Index m = a.rows();
    const Eigen::Index n = a.cols();
    // Tableau [A | I | b] with rows flipped so that b >= 0; the last row holds reduced costs.
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, n + m + 1);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double s = b(i) < 0 ? -1.0 : 1.0;
        t.row(i).head(n) = s * a.row(i);
        t(i, n + i) = 1.0;
        t(i, n + m) = s * b(i);
    }
    std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) basis[static_cast<std::size_t>(i)] = n + i;
    // Phase-one objective: minimize the sum of artificials; cost row = -sum of rows.
    for (Eigen::Index i = 0; i < m; ++i) t.row(m) -= t.row(i);
    for (Eigen::Index i = 0; i < m; ++i) t(m, n + i) = 0.0;

    FeasibilityResult res;
    int degenerate_run = 0;
    for (;;) {
        if (res.pivots >= opt.max_pivots) {
            res.status = Status::NumericalFailure;
            return res;
        }
        const bool bland = degenerate_run >= opt.degenerate_run_before_bland;
        Eigen::Index enter = -1;
        double best = -opt.pivot_tol;
        for (Eigen::Index j = 0; j < n + m; ++j) {
            const double rc = t(m, j);
            if (rc < best) {
                enter = j;
                if (bland) break;
                best = rc;
            }
        }
        if (enter < 0) break;
        Eigen::Index leave = -1;
        double ratio = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < m; ++i) {
            const double coef = t(i, enter);
            if (coef > opt.pivot_tol) {
                const double r = t(i, n + m) / coef;
                if (r < ratio - 1e-15 ||
                    (std::abs(r - ratio) <= 1e-15 && leave >= 0 &&
                     basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
                    ratio = r;
                    leave = i;
                }
            }
        }
        if (leave < 0) {
            // Unbounded is impossible for phase one; treat as numerical trouble.
            res.status = Status::NumericalFailure;
            return res;
        }
        degenerate_run = ratio <= 1e-14 ? degenerate_run + 1 : 0;
        const double piv = t(leave, enter);
        t.row(leave) /= piv;
        for (Eigen::Index i = 0; i <= m; ++i) {
            if (i == leave) continue;
            const double f = t(i, enter);
            if (f != 0.0) t.row(i) -= f * t.row(leave);
        }
        basis[static_cast<std::size_t>(leave)] = enter;
        ++res.pivots;
    }

    res.infeasibility = -t(m, n + m);
    res.w = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::Index j = basis[static_cast<std::size_t>(i)];
        if (j < n) res.w(j) = std::max(0.0, t(i, n + m));
    }
    res.residual = (a * res.w - b).cwiseAbs().maxCoeff();
    if (res.infeasibility > opt.feasibility_tol) {
        res.status = Status::Infeasible;
    } else if (res.residual > opt.residual_tol) {
        res.status = Status::NumericalFailure;
    } else {
        res.status = Status::Feasible;
    }
    return res;
}

}  // namespace trinl::lp
