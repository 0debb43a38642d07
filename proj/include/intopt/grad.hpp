#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "intopt/errors.hpp"
#include "intopt/hsd.hpp"
#include "intopt/problem.hpp"

namespace intopt {

enum class GradFormulation { kHsd, kKktLogBarrier, kKktSquared };

inline const char* to_string(GradFormulation f) {
    switch (f) {
        case GradFormulation::kHsd: return "hsd";
        case GradFormulation::kKktLogBarrier: return "kkt-log";
        case GradFormulation::kKktSquared: return "kkt-sq";
    }
    return "unknown";
}

struct GradConfig {
    GradFormulation formulation = GradFormulation::kHsd;
    double damping = 0.0;          // Tikhonov alpha on the normal matrix
    double squared_weight = 0.1;   // regularizer weight for the squared variant
};

/// d x / d c and companions. Rows index solution components, columns index
/// cost components. `dx` is the Jacobian of the scaled solution the forward
/// pass returns; the `*_system` fields are the raw solution blocks of the
/// underlying linear system (useful for residual checks).
struct Jacobian {
    Matrix dx;
    Matrix dx_system;
    Matrix dy_system;
    Eigen::RowVectorXd dtau_system;
    bool empty_inactive_set = false;
};

inline Matrix damp(const Matrix& m, double alpha) {
    return m + alpha * Matrix::Identity(m.rows(), m.cols());
}

/// Everything the backward pass needs from one forward solve: the tau-scaled
/// terminal iterate, the problem data, and the factorized reduced system
/// (built once, reused across all right-hand-side columns).
class BackwardContext {
public:
    BackwardContext(const StandardFormLP& lp, const LPSolution& sol, const GradConfig& cfg = {})
        : lp_(lp), cfg_(cfg), lambda_(sol.lambda_final), residual_scale_(sol.residual_scale) {
        point_.x = sol.x;
        point_.y = sol.y;
        point_.t = sol.t;
        point_.tau = 1.0;
        point_.kappa = sol.kappa_scaled;
        point_.barrier = sol.lambda_final;
        check_point();
        system_ = std::make_unique<ReducedSystem>(lp_, point_, cfg_.damping, true);
        if (!system_->ok())
            throw NumericalError("backward normal matrix factorization failed after damping retries");
    }

    /// Build from a raw interior point (used when the point comes from a
    /// fixed-barrier solve rather than the early-stopped iteration).
    BackwardContext(const StandardFormLP& lp, const InteriorPoint& scaled_point,
                    double lambda, double residual_scale, const GradConfig& cfg = {})
        : lp_(lp), cfg_(cfg), lambda_(lambda), residual_scale_(residual_scale), point_(scaled_point) {
        check_point();
        system_ = std::make_unique<ReducedSystem>(lp_, point_, cfg_.damping, true);
        if (!system_->ok())
            throw NumericalError("backward normal matrix factorization failed after damping retries");
    }

    const StandardFormLP& lp() const { return lp_; }
    const InteriorPoint& point() const { return point_; }
    const GradConfig& config() const { return cfg_; }
    const ReducedSystem& system() const { return *system_; }
    double lambda() const { return lambda_; }
    double residual_scale() const { return residual_scale_; }
    double damping_used() const { return system_->damping_used(); }

private:
    void check_point() const {
        if (point_.x.size() != lp_.num_vars() || point_.y.size() != lp_.num_rows())
            throw StructuralError("backward context dimensions do not match the problem");
        if (point_.x.minCoeff() <= 0.0 || point_.t.minCoeff() <= 0.0 || point_.tau <= 0.0)
            throw StructuralError("backward context needs a strictly interior point");
    }

    StandardFormLP lp_;
    GradConfig cfg_;
    double lambda_;
    double residual_scale_;
    InteriorPoint point_;
    std::unique_ptr<ReducedSystem> system_;
};

/// Jacobian of the scaled solution map through the self-dual system. Column j
/// solves the same 3-block system as the forward Newton step with right-hand
/// side ((tau - m) e_j, 0, x_j - m), where m is the terminal residual scale:
/// the early-stopped iterate still carries that multiple of the start
/// residuals, and the start's dual residual depends on c. The returned `dx`
/// additionally applies the quotient rule for the tau-scaling of the output,
/// dx = dx_system - x dtau^T.
inline Jacobian dxdc_hsd(const BackwardContext& ctx) {
    const StandardFormLP& lp = ctx.lp();
    const InteriorPoint& pt = ctx.point();
    const Eigen::Index k = lp.num_vars();
    const Eigen::Index p = lp.num_rows();
    const double m = ctx.residual_scale();

    Jacobian jac;
    jac.dx_system.resize(k, k);
    jac.dy_system.resize(p, k);
    jac.dtau_system.resize(k);

    Vector r1 = Vector::Zero(k);
    const Vector r2 = Vector::Zero(p);
    Vector dx(k), dy(p);
    double dtau = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) {
        r1.setZero();
        r1(j) = pt.tau - m;
        ctx.system().solve(r1, r2, pt.x(j) - m, dx, dy, dtau);
        jac.dx_system.col(j) = dx;
        jac.dy_system.col(j) = dy;
        jac.dtau_system(j) = dtau;
    }
    jac.dx = jac.dx_system - pt.x * jac.dtau_system;
    if (!jac.dx.allFinite())
        throw NumericalError("non-finite entries in the solution Jacobian");
    return jac;
}

/// (d x / d c)^T grad_x, computed as the full Jacobian followed by the
/// multiply; bit-identical to calling dxdc_hsd and contracting.
inline Vector vjp(const BackwardContext& ctx, const Vector& grad_x) {
    if (grad_x.size() != ctx.lp().num_vars())
        throw StructuralError("vjp gradient length != variable count");
    const Jacobian jac = dxdc_hsd(ctx);
    return jac.dx.transpose() * grad_x;
}

/// Saddle-system Jacobian of the log-barrier KKT conditions at fixed barrier
/// weight: [[lambda X^-2, -A^T], [A, 0]] [dx; dy] = [-I; 0], solved through
/// the Schur complement on the (1,1) block.
inline Jacobian dxdc_kkt_logbarrier(const BackwardContext& ctx) {
    const StandardFormLP& lp = ctx.lp();
    const Eigen::Index k = lp.num_vars();
    const Eigen::Index p = lp.num_rows();
    const Vector& x = ctx.point().x;
    const double lambda = ctx.lambda();
    if (lambda <= 0.0) throw StructuralError("log-barrier Jacobian needs lambda > 0");

    Vector fxx = lambda * x.cwiseAbs2().cwiseInverse();  // lambda X^-2 diagonal
    Jacobian jac;
    double alpha = 0.0;
    for (int attempt = 0; attempt < 3; ++attempt) {
        Vector d = (fxx.array() + alpha).matrix();
        Vector dinv = d.cwiseInverse();
        Matrix schur = lp.A * dinv.asDiagonal() * lp.A.transpose();
        Eigen::LLT<Matrix> llt(schur);
        if (llt.info() != Eigen::Success) {
            alpha = (alpha == 0.0) ? std::max(ctx.config().damping, 1e-10) : 10.0 * alpha;
            continue;
        }
        // S dy = A D^-1 (-I) * -1 => dy = S^-1 A D^-1; dx = D^-1 A^T dy - D^-1
        Matrix rhs = lp.A * dinv.asDiagonal();  // p x k
        jac.dy_system = llt.solve(rhs);
        jac.dx = dinv.asDiagonal() * (lp.A.transpose() * jac.dy_system) -
                 Matrix(dinv.asDiagonal());
        jac.dx_system = jac.dx;
        jac.dtau_system = Eigen::RowVectorXd::Zero(k);
        if (!jac.dx.allFinite()) throw NumericalError("non-finite KKT log-barrier Jacobian");
        return jac;
    }
    throw NumericalError("KKT log-barrier saddle factorization failed after damping retries");
}

struct KktSquaredOptions {
    double activity_tolerance = 1e-6;  // relative to max(1, ||x||_inf)
};

/// Jacobian of the squared-regularizer variant. Runs its own forward solve of
/// the LP, clips the active set (components at zero), and differentiates the
/// equality-constrained quadratic program on the inactive block:
/// [[2 w I, -A_I^T], [A_I, 0]] [dx_I; dy] = [-I_I; 0].
inline Jacobian dxdc_kkt_squared(const StandardFormLP& lp, double squared_weight,
                                 const SolverConfig& solver_cfg = {},
                                 const KktSquaredOptions& opts = {}) {
    if (squared_weight <= 0.0) throw StructuralError("squared-regularizer weight must be positive");
    const Eigen::Index k = lp.num_vars();
    const Eigen::Index p = lp.num_rows();

    LPSolution sol = solve(lp, solver_cfg);
    if (!sol.ok()) throw NumericalError("forward solve for squared-regularizer Jacobian failed: " +
                                        std::string(to_string(sol.status)));

    const double tol = opts.activity_tolerance * std::max(1.0, sol.x.cwiseAbs().maxCoeff());
    std::vector<Eigen::Index> inactive;
    for (Eigen::Index i = 0; i < k; ++i)
        if (sol.x(i) > tol) inactive.push_back(i);

    Jacobian jac;
    jac.dx = Matrix::Zero(k, k);
    jac.dx_system = Matrix::Zero(k, k);
    jac.dtau_system = Eigen::RowVectorXd::Zero(k);
    if (inactive.empty()) {
        jac.empty_inactive_set = true;
        jac.dy_system = Matrix::Zero(p, k);
        return jac;
    }

    const Eigen::Index ni = static_cast<Eigen::Index>(inactive.size());
    Matrix Ai(p, ni);
    for (Eigen::Index j = 0; j < ni; ++j) Ai.col(j) = lp.A.col(inactive[static_cast<size_t>(j)]);

    double alpha = 0.0;
    for (int attempt = 0; attempt < 3; ++attempt) {
        const double d = 2.0 * squared_weight + alpha;
        Matrix schur = (Ai * Ai.transpose()) / d;
        Eigen::LLT<Matrix> llt(schur);
        if (llt.info() != Eigen::Success) {
            alpha = (alpha == 0.0) ? 1e-10 : 100.0 * alpha;
            continue;
        }
        // Columns j outside the inactive set have zero rhs and zero solution.
        Matrix rhs_cols = Matrix::Zero(p, k);
        for (Eigen::Index j = 0; j < ni; ++j)
            rhs_cols.col(inactive[static_cast<size_t>(j)]) = Ai.col(j) / d;
        Matrix dy = llt.solve(rhs_cols);  // p x k
        Matrix dxi = (Ai.transpose() * dy) / d;  // ni x k
        for (Eigen::Index j = 0; j < ni; ++j)
            dxi(j, inactive[static_cast<size_t>(j)]) -= 1.0 / d;
        for (Eigen::Index j = 0; j < ni; ++j)
            jac.dx.row(inactive[static_cast<size_t>(j)]) = dxi.row(j);
        jac.dx_system = jac.dx;
        jac.dy_system = dy;
        if (!jac.dx.allFinite()) throw NumericalError("non-finite KKT squared Jacobian");
        return jac;
    }
    throw NumericalError("KKT squared saddle factorization failed after damping retries");
}

}  // namespace intopt
