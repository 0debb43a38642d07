#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "intopt/errors.hpp"

namespace intopt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Sense { kMin, kMax };

/// A linear program as the user states it: equality rows, "<=" rows, either
/// optimization sense, and per-variable integrality markers. The markers are
/// metadata for the exact evaluation oracles; the continuous relaxation is
/// what gets solved.
struct GeneralProblem {
    Vector objective;         // length n, in problem units
    Matrix eq_lhs;            // m_eq x n
    Vector eq_rhs;            // m_eq
    Matrix ub_lhs;            // m_ub x n, rows are "<=" constraints
    Vector ub_rhs;            // m_ub
    Sense sense = Sense::kMin;
    std::vector<bool> integrality;  // length n; empty means all continuous

    Eigen::Index num_vars() const { return objective.size(); }

    void validate() const {
        const Eigen::Index n = num_vars();
        if (n == 0) throw StructuralError("problem has no variables");
        if (eq_lhs.rows() != eq_rhs.size())
            throw StructuralError("eq row count mismatch: " + std::to_string(eq_lhs.rows()) +
                                  " rows vs " + std::to_string(eq_rhs.size()) + " rhs entries");
        if (ub_lhs.rows() != ub_rhs.size())
            throw StructuralError("ub row count mismatch");
        if (eq_lhs.rows() > 0 && eq_lhs.cols() != n)
            throw StructuralError("eq column count != variable count");
        if (ub_lhs.rows() > 0 && ub_lhs.cols() != n)
            throw StructuralError("ub column count != variable count");
        if (!integrality.empty() && static_cast<Eigen::Index>(integrality.size()) != n)
            throw StructuralError("integrality flag count != variable count");
    }
};

/// min c^T x  s.t.  Ax = b, x >= 0, with bookkeeping to translate solutions
/// back to the original variables.
struct StandardFormLP {
    Vector c;                 // length k
    Matrix A;                 // p x k
    Vector b;                 // length p
    Eigen::Index slack_begin = 0;   // columns [slack_begin, k) are slacks
    Eigen::Index num_original = 0;  // columns [0, num_original) are original vars
    double sense_sign = 1.0;        // +1 min, -1 max: c = sign * [objective; 0]

    Eigen::Index num_vars() const { return c.size(); }
    Eigen::Index num_rows() const { return b.size(); }

    /// Restrict a standard-form point to the original variables.
    Vector to_original(const Vector& x_std) const {
        return x_std.head(num_original);
    }

    /// Objective in the original problem's units and sense.
    double original_objective(const Vector& x_std) const {
        return sense_sign * c.dot(x_std);
    }

    /// Embed an original-space cost vector: c_std = sign * [c_orig; 0].
    Vector embed_costs(const Vector& c_orig) const {
        if (c_orig.size() != num_original)
            throw StructuralError("cost vector length != original variable count");
        Vector out = Vector::Zero(num_vars());
        out.head(num_original) = sense_sign * c_orig;
        return out;
    }
};

struct PresolveReport {
    std::vector<Eigen::Index> removed_rows;  // indices in the pre-presolve row order
    bool rank_deficiency_detected = false;
    Vector scaling;  // per kept row, strictly positive
};

/// Inequalities gain one fresh slack column each; max problems flip the cost
/// sign. Equality rows pass through untouched.
inline StandardFormLP to_standard_form(const GeneralProblem& p) {
    p.validate();
    const Eigen::Index n = p.num_vars();
    const Eigen::Index m_eq = p.eq_lhs.rows();
    const Eigen::Index m_ub = p.ub_lhs.rows();
    const Eigen::Index k = n + m_ub;
    const Eigen::Index rows = m_eq + m_ub;

    StandardFormLP lp;
    lp.sense_sign = (p.sense == Sense::kMax) ? -1.0 : 1.0;
    lp.num_original = n;
    lp.slack_begin = n;
    lp.c = Vector::Zero(k);
    lp.c.head(n) = lp.sense_sign * p.objective;
    lp.A = Matrix::Zero(rows, k);
    lp.b = Vector::Zero(rows);
    if (m_eq > 0) {
        lp.A.topLeftCorner(m_eq, n) = p.eq_lhs;
        lp.b.head(m_eq) = p.eq_rhs;
    }
    if (m_ub > 0) {
        lp.A.block(m_eq, 0, m_ub, n) = p.ub_lhs;
        lp.A.block(m_eq, n, m_ub, m_ub) = Matrix::Identity(m_ub, m_ub);
        lp.b.tail(m_ub) = p.ub_rhs;
    }
    return lp;
}

/// True iff rank(A) equals the row count under tolerance 1e-10 * ||A||.
inline bool check_full_row_rank(const Matrix& A) {
    if (A.rows() == 0) return true;
    if (A.rows() > A.cols()) return false;
    const double scale = A.cwiseAbs().maxCoeff();
    if (scale == 0.0) return false;
    Eigen::ColPivHouseholderQR<Matrix> qr(A.transpose());
    qr.setThreshold(1e-10 * scale);
    return qr.rank() == A.rows();
}

/// Drops dependent rows (erroring on inconsistent ones), scales the survivors
/// to unit infinity norm, and verifies full row rank.
inline std::pair<StandardFormLP, PresolveReport> presolve(const StandardFormLP& lp) {
    const Eigen::Index p = lp.num_rows();
    const Eigen::Index k = lp.num_vars();
    PresolveReport report;

    // Row-by-row Gram-Schmidt sweep in the original order: a row whose
    // residual against the kept rows vanishes is dependent; it is dropped if
    // its rhs is consistent and fatal otherwise.
    std::vector<Eigen::Index> kept;
    Matrix ortho(p, k);  // orthonormalized kept rows
    const double mat_scale = (p > 0 && k > 0) ? std::max(lp.A.cwiseAbs().maxCoeff(), 1.0) : 1.0;
    const double dep_tol = 1e-10 * mat_scale;
    for (Eigen::Index i = 0; i < p; ++i) {
        Vector r = lp.A.row(i).transpose();
        for (size_t j = 0; j < kept.size(); ++j) {
            const Eigen::Index jj = static_cast<Eigen::Index>(j);
            r -= ortho.row(jj).dot(r) * ortho.row(jj).transpose();
        }
        const double row_norm = lp.A.row(i).norm();
        if (r.norm() <= dep_tol * std::max(1.0, row_norm)) {
            // Dependent row: its rhs must match the same combination of the
            // kept rhs values, else the system is inconsistent.
            double implied = 0.0;
            if (!kept.empty()) {
                Matrix K(static_cast<Eigen::Index>(kept.size()), k);
                Vector bk(static_cast<Eigen::Index>(kept.size()));
                for (size_t j = 0; j < kept.size(); ++j) {
                    K.row(static_cast<Eigen::Index>(j)) = lp.A.row(kept[j]);
                    bk(static_cast<Eigen::Index>(j)) = lp.b(kept[j]);
                }
                Vector w = K.transpose().colPivHouseholderQr().solve(lp.A.row(i).transpose());
                implied = w.dot(bk);
            }
            const double b_scale = 1.0 + lp.b.cwiseAbs().maxCoeff();
            if (std::abs(implied - lp.b(i)) > 1e-8 * b_scale)
                throw InfeasibleError("inconsistent dependent row " + std::to_string(i));
            report.removed_rows.push_back(i);
            continue;
        }
        ortho.row(static_cast<Eigen::Index>(kept.size())) = r.transpose() / r.norm();
        kept.push_back(i);
    }

    StandardFormLP out = lp;
    const Eigen::Index pk = static_cast<Eigen::Index>(kept.size());
    out.A.resize(pk, k);
    out.b.resize(pk);
    report.scaling = Vector::Ones(pk);
    for (Eigen::Index j = 0; j < pk; ++j) {
        const Vector row = lp.A.row(kept[static_cast<size_t>(j)]).transpose();
        const double norm = row.cwiseAbs().maxCoeff();
        const double factor = (norm > 0.0) ? 1.0 / norm : 1.0;
        out.A.row(j) = factor * row.transpose();
        out.b(j) = factor * lp.b(kept[static_cast<size_t>(j)]);
        report.scaling(j) = factor;
    }

    if (!check_full_row_rank(out.A)) {
        report.rank_deficiency_detected = true;
        throw RankDeficientError("constraint matrix is rank deficient after presolve");
    }
    return {out, report};
}

}  // namespace intopt
