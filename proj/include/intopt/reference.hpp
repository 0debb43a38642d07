#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "intopt/errors.hpp"
#include "intopt/hsd.hpp"
#include "intopt/problem.hpp"

namespace intopt {

// Reference solvers for gradient checking. Both solve the smoothed problems
// the KKT formulations differentiate, by routes independent of the saddle
// linear solves under test.

struct BarrierPoint {
    Vector x;
    Vector y;
    Vector t;  // lambda X^{-1} e
    int iterations = 0;
};

/// Equality-constrained barrier problem at a fixed weight:
///     min c.x - lambda sum log x_i  s.t.  A x = b
/// solved by infeasible-start Newton with a fraction-to-boundary safeguard.
inline BarrierPoint barrier_solve(const StandardFormLP& lp, double lambda,
                                  double tol = 1e-12, int max_iter = 200) {
    if (lambda <= 0.0) throw StructuralError("barrier weight must be positive");
    const Eigen::Index k = lp.num_vars();
    const Eigen::Index p = lp.num_rows();
    Vector x = Vector::Ones(k);
    Vector y = Vector::Zero(p);

    for (int iter = 0; iter < max_iter; ++iter) {
        const Vector grad = lp.c - lambda * x.cwiseInverse() - lp.A.transpose() * y;
        const Vector feas = lp.A * x - lp.b;
        const double err = std::max(grad.cwiseAbs().maxCoeff(), feas.cwiseAbs().maxCoeff());
        if (err < tol * (1.0 + lp.b.cwiseAbs().maxCoeff())) {
            BarrierPoint out;
            out.x = x;
            out.y = y;
            out.t = lambda * x.cwiseInverse();
            out.iterations = iter;
            return out;
        }
        // Newton on [[lambda X^-2, -A^T], [A, 0]] via the Schur complement.
        const Vector h = lambda * x.cwiseAbs2().cwiseInverse();
        const Vector hinv = h.cwiseInverse();
        const Matrix schur = lp.A * hinv.asDiagonal() * lp.A.transpose();
        Eigen::LLT<Matrix> llt(schur);
        if (llt.info() != Eigen::Success)
            throw NumericalError("barrier newton schur factorization failed");
        const Vector rhs = lp.A * hinv.cwiseProduct(-grad) + feas;
        const Vector dy = llt.solve(rhs);
        const Vector dx = hinv.cwiseProduct(lp.A.transpose() * dy - grad);
        double step = 1.0;
        for (Eigen::Index i = 0; i < k; ++i)
            if (dx(i) < 0.0) step = std::min(step, -0.95 * x(i) / dx(i));
        x += step * dx;
        y += step * dy;
    }
    throw NumericalError("barrier newton did not converge");
}

/// Quadratic-regularized LP
///     min c.x + w ||x||^2  s.t.  A x = b, x >= 0
/// through its smooth concave dual: maximize
///     g(y) = b.y - sum max((A^T y - c)_i, 0)^2 / (4w)
/// by damped semismooth Newton; the primal recovers by clipping,
/// x_i = max((A^T y - c)_i, 0) / (2w).
inline Vector qp_regularized_solve(const StandardFormLP& lp, double weight,
                                   double tol = 1e-11, int max_iter = 500) {
    if (weight <= 0.0) throw StructuralError("regularizer weight must be positive");
    const Eigen::Index k = lp.num_vars();
    const Eigen::Index p = lp.num_rows();
    Vector y = Vector::Zero(p);

    auto primal = [&](const Vector& yy) -> Vector {
        return ((lp.A.transpose() * yy - lp.c) / (2.0 * weight)).cwiseMax(0.0);
    };
    auto dual_value = [&](const Vector& yy) -> double {
        const Vector u = (lp.A.transpose() * yy - lp.c).cwiseMax(0.0);
        return lp.b.dot(yy) - u.squaredNorm() / (4.0 * weight);
    };

    const double scale = 1.0 + lp.b.cwiseAbs().maxCoeff();
    for (int iter = 0; iter < max_iter; ++iter) {
        const Vector x = primal(y);
        const Vector grad = lp.b - lp.A * x;
        if (grad.cwiseAbs().maxCoeff() < tol * scale) return x;

        // active columns define the local Hessian A_S A_S^T / (2w)
        const Vector u = lp.A.transpose() * y - lp.c;
        Matrix hess = Matrix::Zero(p, p);
        for (Eigen::Index i = 0; i < k; ++i)
            if (u(i) > 0.0) hess += lp.A.col(i) * lp.A.col(i).transpose();
        hess /= 2.0 * weight;
        hess += 1e-12 * scale * Matrix::Identity(p, p);
        Vector dy = hess.ldlt().solve(grad);
        if (!dy.allFinite()) dy = grad;  // gradient-ascent fallback

        double step = 1.0;
        const double g0 = dual_value(y);
        const double slope = grad.dot(dy);
        for (int ls = 0; ls < 60; ++ls) {
            if (dual_value(y + step * dy) >= g0 + 1e-4 * step * slope) break;
            step *= 0.5;
        }
        y += step * dy;
    }
    throw NumericalError("regularized qp dual ascent did not converge");
}

}  // namespace intopt
