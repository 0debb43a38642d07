#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "intopt/grad.hpp"
#include "intopt/gradcheck.hpp"
#include "intopt/hsd.hpp"
#include "intopt/reference.hpp"
#include "oracles.hpp"

using namespace intopt;

namespace {

StandardFormLP make_lp(Matrix A, Vector b, Vector c) {
    StandardFormLP lp;
    lp.A = std::move(A);
    lp.b = std::move(b);
    lp.c = std::move(c);
    lp.num_original = lp.c.size();
    lp.slack_begin = lp.c.size();
    return lp;
}

}  // namespace

TEST_CASE("damping is a plain diagonal shift") {
    Matrix m = Matrix::Zero(1, 1);
    CHECK(damp(m, 0.0) == m);
    CHECK(damp(m, 1e-3)(0, 0) == Catch::Approx(1e-3));

    std::mt19937_64 rng(2);
    std::normal_distribution<double> gauss;
    Matrix r(4, 4);
    for (Eigen::Index i = 0; i < 4; ++i)
        for (Eigen::Index j = 0; j < 4; ++j) r(i, j) = gauss(rng);
    Matrix sym = r + r.transpose();
    const double alpha = 0.37;
    Eigen::SelfAdjointEigenSolver<Matrix> before(sym);
    Eigen::SelfAdjointEigenSolver<Matrix> after(damp(sym, alpha));
    for (Eigen::Index i = 0; i < 4; ++i)
        CHECK(after.eigenvalues()(i) == Catch::Approx(before.eigenvalues()(i) + alpha));
}

TEST_CASE("damping monotonicity: larger alpha never grows the inverse") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> gauss;
    Matrix r(5, 5);
    for (Eigen::Index i = 0; i < 5; ++i)
        for (Eigen::Index j = 0; j < 5; ++j) r(i, j) = gauss(rng);
    Matrix spd = r * r.transpose() + 0.1 * Matrix::Identity(5, 5);
    double prev = std::numeric_limits<double>::infinity();
    for (double alpha : {0.0, 1e-4, 1e-2, 1.0, 10.0}) {
        Eigen::SelfAdjointEigenSolver<Matrix> eig(damp(spd, alpha));
        const double inv_norm = 1.0 / eig.eigenvalues().minCoeff();
        CHECK(inv_norm <= prev + 1e-15);
        prev = inv_norm;
    }
}

TEST_CASE("fully constrained problems have an exactly zero Jacobian") {
    // square invertible A pins x; all three formulations must return zero
    StandardFormLP lp = make_lp(Matrix{{1.0}}, Vector{{1.0}}, Vector{{0.8}});
    LPSolution sol = solve(lp, {});
    REQUIRE(sol.ok());
    CHECK(sol.x(0) == Catch::Approx(1.0).margin(1e-6));

    BackwardContext ctx(lp, sol, {});
    CHECK(dxdc_hsd(ctx).dx.cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(dxdc_kkt_logbarrier(ctx).dx.cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(dxdc_kkt_squared(lp, 0.5).dx.cwiseAbs().maxCoeff() <= 1e-8);

    std::mt19937_64 rng(5);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 5; ++trial) {
        Matrix a(3, 3);
        for (Eigen::Index i = 0; i < 3; ++i)
            for (Eigen::Index j = 0; j < 3; ++j) a(i, j) = gauss(rng);
        Vector x0 = Vector::Constant(3, 1.0) + Vector::Random(3) * 0.3;
        StandardFormLP sq = make_lp(a, a * x0, Vector{{1.0, 2.0, 0.5}});
        LPSolution s = solve(sq, {});
        REQUIRE(s.ok());
        BackwardContext c2(sq, s, {});
        CHECK(dxdc_hsd(c2).dx.cwiseAbs().maxCoeff() <= 1e-8);
    }
}

TEST_CASE("returned columns satisfy the backward linear system") {
    std::mt19937_64 rng(7);
    StandardFormLP lp = oracles::random_feasible_lp(rng, 6, 3);
    SolverConfig scfg;
    scfg.lambda_cutoff = 0.1;
    LPSolution sol = solve(lp, scfg);
    REQUIRE(sol.ok());
    GradConfig gcfg;
    gcfg.damping = 0.0;
    BackwardContext ctx(lp, sol, gcfg);
    Jacobian jac = dxdc_hsd(ctx);

    const Matrix assembled = ctx.system().assemble();
    const double m = ctx.residual_scale();
    const Eigen::Index k = lp.num_vars();
    const Eigen::Index p = lp.num_rows();
    for (Eigen::Index j = 0; j < k; ++j) {
        Vector rhs = Vector::Zero(k + p + 1);
        rhs(j) = 1.0 - m;
        rhs(k + p) = ctx.point().x(j) - m;
        Vector solvec(k + p + 1);
        solvec << jac.dx_system.col(j), jac.dy_system.col(j), jac.dtau_system(j);
        CHECK((assembled * solvec - rhs).norm() <= 1e-8 * (1.0 + rhs.norm()));
    }
}

TEST_CASE("hsd jacobian matches finite differences of the early-stopped solver") {
    std::mt19937_64 rng(11);
    SolverConfig scfg;
    scfg.lambda_cutoff = 0.1;
    GradConfig gcfg;
    gcfg.damping = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
        StandardFormLP lp = oracles::random_feasible_lp(rng, 8, 4);
        GradCheckReport report = grad_check_hsd(lp, scfg, gcfg, 1e-4);
        for (double cos : report.column_cosines) CHECK(cos >= 0.99);
    }
}

TEST_CASE("vjp basics and bit-identity with the full jacobian") {
    std::mt19937_64 rng(13);
    StandardFormLP lp = oracles::random_feasible_lp(rng, 5, 2);
    SolverConfig scfg;
    scfg.lambda_cutoff = 0.1;
    LPSolution sol = solve(lp, scfg);
    REQUIRE(sol.ok());
    BackwardContext ctx(lp, sol, {});

    CHECK(vjp(ctx, Vector::Zero(5)).cwiseAbs().maxCoeff() == 0.0);

    Jacobian jac = dxdc_hsd(ctx);
    for (Eigen::Index i = 0; i < 5; ++i) {
        Vector unit = Vector::Zero(5);
        unit(i) = 1.0;
        const Vector row = vjp(ctx, unit);
        CHECK((row - jac.dx.row(i).transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
    const Vector by_hand = jac.dx.transpose() * lp.c;
    const Vector direct = vjp(ctx, lp.c);
    CHECK((by_hand - direct).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("regret-gradient vjp agrees with finite differences of the true-cost objective") {
    std::mt19937_64 rng(17);
    StandardFormLP lp = oracles::random_feasible_lp(rng, 6, 3);
    SolverConfig scfg;
    scfg.lambda_cutoff = 0.1;
    LPSolution sol = solve(lp, scfg);
    REQUIRE(sol.ok());
    BackwardContext ctx(lp, sol, {});
    const Vector true_costs = lp.c;  // play the role of the fixed task costs
    const Vector analytic = vjp(ctx, true_costs);

    const double h = 1e-5;
    Vector fd(6);
    for (Eigen::Index j = 0; j < 6; ++j) {
        StandardFormLP up = lp, down = lp;
        up.c(j) += h;
        down.c(j) -= h;
        fd(j) = (true_costs.dot(solve(up, scfg).x) - true_costs.dot(solve(down, scfg).x)) /
                (2.0 * h);
    }
    CHECK(cosine_similarity(analytic, fd) >= 0.99);
}

TEST_CASE("kkt log-barrier jacobian") {
    SECTION("square system forces zero") {
        StandardFormLP lp = make_lp(Matrix{{1.0}}, Vector{{1.0}}, Vector{{0.3}});
        LPSolution sol = solve(lp, {});
        REQUIRE(sol.ok());
        BackwardContext ctx(lp, sol, {});
        Jacobian jac = dxdc_kkt_logbarrier(ctx);
        CHECK(jac.dx.cwiseAbs().maxCoeff() <= 1e-12);
    }
    SECTION("saddle system residual") {
        std::mt19937_64 rng(19);
        StandardFormLP lp = oracles::random_feasible_lp(rng, 6, 3);
        const double lambda = 0.1;
        BarrierPoint base = barrier_solve(lp, lambda);
        InteriorPoint pt;
        pt.x = base.x;
        pt.y = base.y;
        pt.t = base.t;
        pt.tau = 1.0;
        pt.kappa = lambda;
        pt.barrier = lambda;
        BackwardContext ctx(lp, pt, lambda, 0.0, {});
        Jacobian jac = dxdc_kkt_logbarrier(ctx);
        // assemble [[lambda X^-2, -A^T],[A, 0]] [dx; dy] = [-I; 0]
        const Eigen::Index k = 6, p = 3;
        Matrix saddle = Matrix::Zero(k + p, k + p);
        saddle.topLeftCorner(k, k) =
            Matrix((lambda * base.x.cwiseAbs2().cwiseInverse()).asDiagonal());
        saddle.topRightCorner(k, p) = -lp.A.transpose();
        saddle.bottomLeftCorner(p, k) = lp.A;
        Matrix lhs(k + p, k);
        lhs << jac.dx, jac.dy_system;
        Matrix rhs = Matrix::Zero(k + p, k);
        rhs.topLeftCorner(k, k) = -Matrix::Identity(k, k);
        CHECK((saddle * lhs - rhs).cwiseAbs().maxCoeff() <= 1e-8);
    }
    SECTION("finite differences of the fixed-weight barrier solution") {
        std::mt19937_64 rng(23);
        for (int trial = 0; trial < 3; ++trial) {
            StandardFormLP lp = oracles::random_feasible_lp(rng, 6, 3);
            GradCheckReport report = grad_check_kkt_logbarrier(lp, 0.1, {}, 1e-5);
            CHECK(report.max_relative_error <= 1e-2);
        }
    }
}

TEST_CASE("kkt squared-regularizer jacobian") {
    SECTION("square system forces zero") {
        StandardFormLP lp = make_lp(Matrix{{1.0}}, Vector{{1.0}}, Vector{{0.3}});
        Jacobian jac = dxdc_kkt_squared(lp, 0.5);
        CHECK(jac.dx.cwiseAbs().maxCoeff() <= 1e-12);
    }
    SECTION("finite differences of the regularized program") {
        std::mt19937_64 rng(29);
        for (int trial = 0; trial < 3; ++trial) {
            StandardFormLP lp = oracles::random_feasible_lp(rng, 6, 3);
            GradCheckReport report = grad_check_kkt_squared(lp, 0.5, {}, 1e-5);
            CHECK(report.max_relative_error <= 1e-2);
        }
    }
}

TEST_CASE("forward and backward assemble bit-identical coefficient matrices") {
    std::mt19937_64 rng(31);
    StandardFormLP lp = oracles::random_feasible_lp(rng, 5, 2);
    SolverConfig scfg;
    scfg.lambda_cutoff = 0.1;
    LPSolution sol = solve(lp, scfg);
    REQUIRE(sol.ok());
    GradConfig gcfg;
    gcfg.damping = 0.0;
    BackwardContext ctx(lp, sol, gcfg);

    // the forward-pass system constructed at the same (scaled) iterate
    ReducedSystem forward_sys(lp, ctx.point(), 1e-6);
    const Matrix a = forward_sys.assemble();
    const Matrix b = ctx.system().assemble();
    REQUIRE(a.rows() == b.rows());
    CHECK((a.array() == b.array()).all());
}

TEST_CASE("backward context validates its inputs") {
    std::mt19937_64 rng(37);
    StandardFormLP lp = oracles::random_feasible_lp(rng, 4, 2);
    LPSolution sol = solve(lp, {});
    REQUIRE(sol.ok());
    LPSolution broken = sol;
    broken.x(0) = -1.0;
    CHECK_THROWS_AS(BackwardContext(lp, broken, GradConfig{}), StructuralError);
}
