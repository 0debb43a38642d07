#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "intopt/grad.hpp"
#include "intopt/hsd.hpp"
#include "intopt/problem.hpp"
#include "intopt/reference.hpp"

namespace intopt {

inline double cosine_similarity(const Vector& a, const Vector& b) {
    const double na = a.norm();
    const double nb = b.norm();
    if (na == 0.0 && nb == 0.0) return 1.0;
    if (na == 0.0 || nb == 0.0) return 0.0;
    return a.dot(b) / (na * nb);
}

/// Central finite differences of a map R^k -> R^k, column by column.
inline Matrix fd_jacobian(const std::function<Vector(const Vector&)>& map, const Vector& at,
                          double step) {
    const Eigen::Index k = at.size();
    Vector base = map(at);
    Matrix jac(base.size(), k);
    for (Eigen::Index j = 0; j < k; ++j) {
        Vector up = at, down = at;
        up(j) += step;
        down(j) -= step;
        jac.col(j) = (map(up) - map(down)) / (2.0 * step);
    }
    return jac;
}

struct GradCheckReport {
    std::vector<double> column_cosines;
    double fraction_passing = 0.0;   // cosine >= 0.99
    double max_relative_error = 0.0;  // max over columns of ||J-FD|| / (eps+||FD||)
    double jacobian_inf_norm = 0.0;
};

inline GradCheckReport compare_jacobians(const Matrix& analytic, const Matrix& fd) {
    GradCheckReport report;
    report.jacobian_inf_norm = analytic.size() > 0 ? analytic.cwiseAbs().maxCoeff() : 0.0;
    int pass = 0;
    for (Eigen::Index j = 0; j < analytic.cols(); ++j) {
        const double cos = cosine_similarity(analytic.col(j), fd.col(j));
        report.column_cosines.push_back(cos);
        if (cos >= 0.99) ++pass;
        const double denom = 1e-12 + fd.col(j).norm();
        report.max_relative_error =
            std::max(report.max_relative_error, (analytic.col(j) - fd.col(j)).norm() / denom);
    }
    if (!report.column_cosines.empty())
        report.fraction_passing =
            static_cast<double>(pass) / static_cast<double>(report.column_cosines.size());
    return report;
}

/// Analytic self-dual-system Jacobian at the lambda-cutoff stopping point vs
/// central finite differences of the early-stopped forward map itself.
inline GradCheckReport grad_check_hsd(const StandardFormLP& lp, const SolverConfig& solver_cfg,
                                      const GradConfig& grad_cfg, double fd_step) {
    LPSolution sol = solve(lp, solver_cfg);
    if (!sol.ok()) throw NumericalError("grad check forward solve failed");
    BackwardContext ctx(lp, sol, grad_cfg);
    const Jacobian jac = dxdc_hsd(ctx);

    auto map = [&](const Vector& costs) -> Vector {
        StandardFormLP perturbed = lp;
        perturbed.c = costs;
        LPSolution s = solve(perturbed, solver_cfg);
        if (!s.ok()) throw NumericalError("grad check perturbed solve failed");
        return s.x;
    };
    const Matrix fd = fd_jacobian(map, lp.c, fd_step);
    return compare_jacobians(jac.dx, fd);
}

/// KKT log-barrier Jacobian vs finite differences of the fixed-weight barrier
/// solution, both at the same barrier weight.
inline GradCheckReport grad_check_kkt_logbarrier(const StandardFormLP& lp, double lambda,
                                                 const GradConfig& grad_cfg, double fd_step) {
    BarrierPoint base = barrier_solve(lp, lambda);
    InteriorPoint pt;
    pt.x = base.x;
    pt.y = base.y;
    pt.t = base.t;
    pt.tau = 1.0;
    pt.kappa = lambda;
    pt.barrier = lambda;
    BackwardContext ctx(lp, pt, lambda, 0.0, grad_cfg);
    const Jacobian jac = dxdc_kkt_logbarrier(ctx);

    auto map = [&](const Vector& costs) -> Vector {
        StandardFormLP perturbed = lp;
        perturbed.c = costs;
        return barrier_solve(perturbed, lambda).x;
    };
    const Matrix fd = fd_jacobian(map, lp.c, fd_step);
    return compare_jacobians(jac.dx, fd);
}

/// KKT squared-regularizer Jacobian vs finite differences of the regularized
/// quadratic program's solution at the same weight.
inline GradCheckReport grad_check_kkt_squared(const StandardFormLP& lp, double squared_weight,
                                              const SolverConfig& solver_cfg, double fd_step) {
    const Jacobian jac = dxdc_kkt_squared(lp, squared_weight, solver_cfg);

    auto map = [&](const Vector& costs) -> Vector {
        StandardFormLP perturbed = lp;
        perturbed.c = costs;
        return qp_regularized_solve(perturbed, squared_weight);
    };
    const Matrix fd = fd_jacobian(map, lp.c, fd_step);
    return compare_jacobians(jac.dx, fd);
}

}  // namespace intopt
