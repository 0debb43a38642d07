#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "intopt/errors.hpp"
#include "intopt/problem.hpp"

namespace intopt {

/// Iterate of the homogeneous self-dual embedding. All of x, t, tau, kappa
/// stay strictly positive; barrier is the normalized complementarity gap.
struct InteriorPoint {
    Vector x;       // primal, length k
    Vector y;       // dual, length p
    Vector t;       // dual slack, length k
    double tau = 1.0;
    double kappa = 1.0;
    double barrier = 1.0;  // (x.t + tau*kappa) / (k+1)

    double min_positive() const {
        double m = std::min(tau, kappa);
        if (x.size() > 0) m = std::min(m, x.minCoeff());
        if (t.size() > 0) m = std::min(m, t.minCoeff());
        return m;
    }

    void update_barrier() {
        barrier = (x.dot(t) + tau * kappa) / static_cast<double>(x.size() + 1);
    }
};

/// All-ones start: x = t = e, y = 0, tau = kappa = 1, so the barrier starts
/// at exactly 1.
inline InteriorPoint initialize(Eigen::Index k, Eigen::Index p) {
    if (k < 1 || p < 1) throw StructuralError("initialize needs k, p >= 1");
    InteriorPoint pt;
    pt.x = Vector::Ones(k);
    pt.y = Vector::Zero(p);
    pt.t = Vector::Ones(k);
    pt.tau = 1.0;
    pt.kappa = 1.0;
    pt.update_barrier();
    return pt;
}

struct SolverConfig {
    double lambda_cutoff = 1e-8;  // stop once barrier < cutoff
    int max_iterations = 300;
    double gamma = 0.1;              // centering weight, aggressive phase
    std::optional<double> eta;       // residual-reduction weight; default 1 - gamma
    double step_fraction = 0.99;     // rho, fraction of the blocking step
    double damping = 1e-6;           // Tikhonov base for factorization retries
    // Near the cutoff the iterate must be well centered for the backward
    // system to track the forward map, so the last band of iterations runs
    // with a strong centering weight.
    double gamma_final = 0.9;
    double centering_band = 20.0;    // switch when barrier < band * cutoff
    bool predictor_corrector = false;  // Mehrotra-style adaptive mode
    double tau_infeasible = 1e-10;
    double kappa_infeasible = 1e-6;
};

enum class SolveStatus {
    kConverged,
    kIterationLimit,
    kInfeasibleOrUnbounded,
    kNumericalFailure,
};

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::kConverged: return "converged";
        case SolveStatus::kIterationLimit: return "iteration_limit";
        case SolveStatus::kInfeasibleOrUnbounded: return "infeasible_or_unbounded";
        case SolveStatus::kNumericalFailure: return "numerical_failure";
    }
    return "unknown";
}

/// Residual blocks of the Newton system, sign-flipped so the directions solve
/// J d = r directly.
struct NewtonRhs {
    Vector primal;   // -eta (A x - b tau)
    Vector dual;     // -eta (A^T y + t - c tau)
    double gap = 0;  // -eta (-c^T x + b^T y - kappa)
    Vector comp;     // -(X t - gamma lambda e)
    double comp_tk = 0;  // -(tau kappa - gamma lambda)
};

inline NewtonRhs newton_rhs(const InteriorPoint& pt, const StandardFormLP& lp,
                            double gamma, double eta) {
    NewtonRhs r;
    r.primal = -eta * (lp.A * pt.x - lp.b * pt.tau);
    r.dual = -eta * (lp.A.transpose() * pt.y + pt.t - lp.c * pt.tau);
    r.gap = -eta * (-lp.c.dot(pt.x) + lp.b.dot(pt.y) - pt.kappa);
    r.comp = -(pt.x.cwiseProduct(pt.t).array() - gamma * pt.barrier).matrix();
    r.comp_tk = -(pt.tau * pt.kappa - gamma * pt.barrier);
    return r;
}

/// The 3-block reduced system
///     [ -X^{-1}T  A^T  -c ] [dx  ]   [r1]
///     [  A        0    -b ] [dy  ] = [r2]
///     [ -c^T      b^T  k/t] [dtau]   [r3]
/// solved through the normal-equation decomposition: with
/// W = [[-X^{-1}T, A^T], [A, 0]], solve W [p;q] = [c;b] and W [u;v] = [r1;r2]
/// via M v = A T^{-1} X r1 + r2 (Cholesky on M = A T^{-1} X A^T), then
/// dtau = (r3 + u.c - v.b) / (-c.p + b.q + kappa/tau). The same object serves
/// the forward Newton steps and the backward linear systems; only the right
/// hand side differs.
class ReducedSystem {
public:
    ReducedSystem(const StandardFormLP& lp, const InteriorPoint& pt, double damping_base)
        : A_(lp.A), c_(lp.c), b_(lp.b), kt_ratio_(pt.kappa / pt.tau) {
        scaling_ = pt.x.cwiseQuotient(pt.t);  // T^{-1} X diagonal
        Matrix M = A_ * scaling_.asDiagonal() * A_.transpose();
        normal_matrix_ = M;
        // Cholesky with Tikhonov retries: alpha, then 10 alpha, then 100 alpha.
        double alpha = 0.0;
        for (int attempt = 0; attempt < 4; ++attempt) {
            llt_.compute(M + alpha * Matrix::Identity(M.rows(), M.cols()));
            if (llt_.info() == Eigen::Success) {
                damping_used_ = alpha;
                factorized_ = true;
                break;
            }
            alpha = (alpha == 0.0) ? std::max(damping_base, 1e-14) : 10.0 * alpha;
        }
        if (factorized_) {
            Vector p, q;
            solve_w(c_, b_, p, q);
            anchor_p_ = p;
            anchor_q_ = q;
            denom_ = -c_.dot(p) + b_.dot(q) + kt_ratio_;
        }
    }

    /// Construct with an explicit damping applied up front (backward pass);
    /// retries still escalate if that fails.
    ReducedSystem(const StandardFormLP& lp, const InteriorPoint& pt, double alpha,
                  bool apply_always)
        : A_(lp.A), c_(lp.c), b_(lp.b), kt_ratio_(pt.kappa / pt.tau) {
        scaling_ = pt.x.cwiseQuotient(pt.t);
        Matrix M = A_ * scaling_.asDiagonal() * A_.transpose();
        normal_matrix_ = M;
        double a = apply_always ? alpha : 0.0;
        for (int attempt = 0; attempt < 4; ++attempt) {
            llt_.compute(M + a * Matrix::Identity(M.rows(), M.cols()));
            if (llt_.info() == Eigen::Success) {
                damping_used_ = a;
                factorized_ = true;
                break;
            }
            a = (a == 0.0) ? std::max(alpha, 1e-10) : 10.0 * a;
        }
        if (factorized_) {
            Vector p, q;
            solve_w(c_, b_, p, q);
            anchor_p_ = p;
            anchor_q_ = q;
            denom_ = -c_.dot(p) + b_.dot(q) + kt_ratio_;
        }
    }

    bool ok() const { return factorized_ && std::isfinite(denom_) && denom_ != 0.0; }
    double damping_used() const { return damping_used_; }
    const Matrix& normal_matrix() const { return normal_matrix_; }

    /// Solve for one right-hand side (r1, r2, r3); returns (dx, dy, dtau).
    void solve(const Vector& r1, const Vector& r2, double r3,
               Vector& dx, Vector& dy, double& dtau) const {
        Vector u, v;
        solve_w(r1, r2, u, v);
        dtau = (r3 + u.dot(c_) - v.dot(b_)) / denom_;
        dx = u + anchor_p_ * dtau;
        dy = v + anchor_q_ * dtau;
    }

    /// Dense assembly of the 3-block coefficient matrix; shared by the
    /// forward and backward passes and by the residual tests.
    Matrix assemble() const {
        const Eigen::Index k = c_.size();
        const Eigen::Index p = b_.size();
        Matrix full = Matrix::Zero(k + p + 1, k + p + 1);
        full.topLeftCorner(k, k) = (-scaling_.cwiseInverse()).asDiagonal();
        full.block(0, k, k, p) = A_.transpose();
        full.block(0, k + p, k, 1) = -c_;
        full.block(k, 0, p, k) = A_;
        full.block(k, k + p, p, 1) = -b_;
        full.block(k + p, 0, 1, k) = -c_.transpose();
        full.block(k + p, k, 1, p) = b_.transpose();
        full(k + p, k + p) = kt_ratio_;
        return full;
    }

private:
    void solve_w(const Vector& r1, const Vector& r2, Vector& u, Vector& v) const {
        Vector rhs = A_ * scaling_.cwiseProduct(r1) + r2;
        v = llt_.solve(rhs);
        u = scaling_.cwiseProduct(A_.transpose() * v - r1);
    }

    Matrix A_;
    Vector c_, b_;
    Vector scaling_;  // T^{-1} X
    Matrix normal_matrix_;
    Eigen::LLT<Matrix> llt_;
    Vector anchor_p_, anchor_q_;
    double kt_ratio_ = 0.0;
    double denom_ = 0.0;
    double damping_used_ = 0.0;
    bool factorized_ = false;
};

/// Back-substitution for the eliminated blocks:
/// dt = X^{-1}(r_comp - T dx),  dkappa = (r_comp_tk - kappa dtau) / tau.
inline void recover_dt_dkappa(const InteriorPoint& pt, const Vector& dx, double dtau,
                              const Vector& r_comp, double r_comp_tk,
                              Vector& dt, double& dkappa) {
    dt = (r_comp - pt.t.cwiseProduct(dx)).cwiseQuotient(pt.x);
    dkappa = (r_comp_tk - pt.kappa * dtau) / pt.tau;
}

struct Direction {
    Vector dx, dy, dt;
    double dtau = 0.0, dkappa = 0.0;
};

/// Largest step keeping all positivity-constrained quantities positive:
/// omega = min(1, rho * min over negative components of -v/dv).
inline double step_size(const InteriorPoint& pt, const Direction& dir, double rho) {
    double blocking = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < pt.x.size(); ++i) {
        if (dir.dx(i) < 0.0) blocking = std::min(blocking, -pt.x(i) / dir.dx(i));
        if (dir.dt(i) < 0.0) blocking = std::min(blocking, -pt.t(i) / dir.dt(i));
    }
    if (dir.dtau < 0.0) blocking = std::min(blocking, -pt.tau / dir.dtau);
    if (dir.dkappa < 0.0) blocking = std::min(blocking, -pt.kappa / dir.dkappa);
    if (!std::isfinite(blocking)) return 1.0;
    return std::min(1.0, rho * blocking);
}

struct LPSolution {
    SolveStatus status = SolveStatus::kConverged;
    Vector x;  // tau-scaled primal
    Vector y;  // tau-scaled dual
    Vector t;  // tau-scaled dual slack
    double objective = 0.0;       // c^T x in standard form
    double lambda_final = 0.0;    // barrier of the scaled point
    double kappa_scaled = 0.0;    // kappa / tau^2
    double residual_scale = 0.0;  // lambda/tau at termination: scaled-point
                                  // infeasibility as a multiple of the
                                  // all-ones start residuals
    int iterations = 0;
    double primal_residual = 0.0;  // ||A x - b||_inf of the scaled point
    double dual_residual = 0.0;    // ||A^T y + t - c||_inf of the scaled point
    InteriorPoint terminal;        // pre-scaling iterate
    std::vector<double> barrier_trace;  // barrier value after each accepted step
    std::string message;

    bool ok() const { return status == SolveStatus::kConverged; }
};

namespace detail {

inline bool finite(const Vector& v) { return v.allFinite(); }

}  // namespace detail

/// Forward pass: damped Newton iteration on the homogeneous self-dual system,
/// stopping as soon as the barrier drops below the cutoff. Returns the
/// tau-scaled solution together with the pre-scaling terminal iterate.
inline LPSolution solve(const StandardFormLP& lp, const SolverConfig& cfg = {}) {
    const Eigen::Index k = lp.num_vars();
    const Eigen::Index p = lp.num_rows();
    if (cfg.lambda_cutoff <= 0.0) throw StructuralError("lambda cutoff must be positive");
    if (cfg.step_fraction <= 0.0 || cfg.step_fraction >= 1.0)
        throw StructuralError("step fraction must lie in (0,1)");

    LPSolution sol;
    InteriorPoint pt = initialize(k, p);
    sol.status = SolveStatus::kIterationLimit;

    int iter = 0;
    for (; iter < cfg.max_iterations; ++iter) {
        if (pt.barrier < cfg.lambda_cutoff) {
            sol.status = SolveStatus::kConverged;
            break;
        }
        if (pt.tau < cfg.tau_infeasible && pt.kappa > cfg.kappa_infeasible) {
            sol.status = SolveStatus::kInfeasibleOrUnbounded;
            sol.message = "tau vanished with kappa bounded away from zero";
            break;
        }

        const bool centering = pt.barrier < cfg.centering_band * cfg.lambda_cutoff;
        double gamma = centering ? cfg.gamma_final : cfg.gamma;
        double eta = cfg.eta.value_or(1.0 - gamma);

        ReducedSystem sys(lp, pt, cfg.damping);
        if (!sys.ok()) {
            sol.status = SolveStatus::kNumericalFailure;
            sol.message = "normal matrix factorization failed";
            break;
        }

        Direction dir;
        if (cfg.predictor_corrector) {
            // Affine probe (gamma = 0, eta = 1), then adaptive centering with
            // a corrector that carries the second-order complementarity terms.
            NewtonRhs aff = newton_rhs(pt, lp, 0.0, 1.0);
            Vector r1 = aff.dual - aff.comp.cwiseQuotient(pt.x);
            double r3 = aff.gap + aff.comp_tk / pt.tau;
            Direction da;
            sys.solve(r1, aff.primal, r3, da.dx, da.dy, da.dtau);
            recover_dt_dkappa(pt, da.dx, da.dtau, aff.comp, aff.comp_tk, da.dt, da.dkappa);
            const double alpha_aff = step_size(pt, da, 1.0);
            const double gap_aff =
                ((pt.x + alpha_aff * da.dx).dot(pt.t + alpha_aff * da.dt) +
                 (pt.tau + alpha_aff * da.dtau) * (pt.kappa + alpha_aff * da.dkappa)) /
                static_cast<double>(k + 1);
            double ratio = std::max(gap_aff, 0.0) / pt.barrier;
            gamma = std::clamp(ratio * ratio * ratio, 0.01, 0.9);
            if (centering) gamma = std::max(gamma, cfg.gamma_final);
            eta = 1.0 - gamma;
            NewtonRhs rhs = newton_rhs(pt, lp, gamma, eta);
            rhs.comp -= da.dx.cwiseProduct(da.dt);
            rhs.comp_tk -= da.dtau * da.dkappa;
            Vector c1 = rhs.dual - rhs.comp.cwiseQuotient(pt.x);
            double c3 = rhs.gap + rhs.comp_tk / pt.tau;
            sys.solve(c1, rhs.primal, c3, dir.dx, dir.dy, dir.dtau);
            recover_dt_dkappa(pt, dir.dx, dir.dtau, rhs.comp, rhs.comp_tk, dir.dt, dir.dkappa);
        } else {
            NewtonRhs rhs = newton_rhs(pt, lp, gamma, eta);
            Vector r1 = rhs.dual - rhs.comp.cwiseQuotient(pt.x);
            double r3 = rhs.gap + rhs.comp_tk / pt.tau;
            sys.solve(r1, rhs.primal, r3, dir.dx, dir.dy, dir.dtau);
            recover_dt_dkappa(pt, dir.dx, dir.dtau, rhs.comp, rhs.comp_tk, dir.dt, dir.dkappa);
        }

        if (!detail::finite(dir.dx) || !detail::finite(dir.dy) || !detail::finite(dir.dt) ||
            !std::isfinite(dir.dtau) || !std::isfinite(dir.dkappa)) {
            sol.status = SolveStatus::kNumericalFailure;
            sol.message = "non-finite Newton direction";
            break;
        }

        const double omega = step_size(pt, dir, cfg.step_fraction);
        pt.x += omega * dir.dx;
        pt.y += omega * dir.dy;
        pt.t += omega * dir.dt;
        pt.tau += omega * dir.dtau;
        pt.kappa += omega * dir.dkappa;
        pt.update_barrier();
        sol.barrier_trace.push_back(pt.barrier);

        if (pt.min_positive() <= 0.0) {
            sol.status = SolveStatus::kNumericalFailure;
            sol.message = "interiority lost";
            break;
        }
    }
    if (iter >= cfg.max_iterations && pt.barrier < cfg.lambda_cutoff)
        sol.status = SolveStatus::kConverged;

    sol.iterations = iter;
    sol.terminal = pt;
    sol.residual_scale = pt.barrier / pt.tau;
    sol.x = pt.x / pt.tau;
    sol.y = pt.y / pt.tau;
    sol.t = pt.t / pt.tau;
    sol.kappa_scaled = pt.kappa / (pt.tau * pt.tau);
    sol.lambda_final =
        (sol.x.dot(sol.t) + sol.kappa_scaled) / static_cast<double>(k + 1);
    sol.objective = lp.c.dot(sol.x);
    sol.primal_residual = (lp.A * sol.x - lp.b).cwiseAbs().maxCoeff();
    sol.dual_residual = (lp.A.transpose() * sol.y + sol.t - lp.c).cwiseAbs().maxCoeff();
    return sol;
}

}  // namespace intopt
