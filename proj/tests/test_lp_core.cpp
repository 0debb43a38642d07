#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "intopt/json_io.hpp"
#include "intopt/problem.hpp"
#include "oracles.hpp"

using namespace intopt;

TEST_CASE("slack insertion for a single inequality") {
    GeneralProblem p;
    p.objective = Vector{{1.0}};
    p.ub_lhs = Matrix{{1.0}};
    p.ub_rhs = Vector{{3.0}};
    StandardFormLP lp = to_standard_form(p);
    REQUIRE(lp.c.size() == 2);
    CHECK(lp.c(0) == 1.0);
    CHECK(lp.c(1) == 0.0);
    CHECK(lp.A.rows() == 1);
    CHECK(lp.A(0, 0) == 1.0);
    CHECK(lp.A(0, 1) == 1.0);
    CHECK(lp.b(0) == 3.0);
    CHECK(lp.slack_begin == 1);
}

TEST_CASE("equality rows pass through without slacks") {
    GeneralProblem p;
    p.objective = Vector{{1.0}};
    p.eq_lhs = Matrix{{1.0}};
    p.eq_rhs = Vector{{2.0}};
    StandardFormLP lp = to_standard_form(p);
    CHECK(lp.c.size() == 1);
    CHECK(lp.A.rows() == 1);
    CHECK(lp.A.cols() == 1);
    CHECK(lp.b(0) == 2.0);
}

TEST_CASE("max-sense knapsack becomes negated min form") {
    GeneralProblem p;
    p.objective = Vector{{10.0, 6.0}};
    p.ub_lhs = Matrix{{1.0, 1.0}};
    p.ub_rhs = Vector{{1.0}};
    p.sense = Sense::kMax;
    StandardFormLP lp = to_standard_form(p);
    REQUIRE(lp.c.size() == 3);
    CHECK(lp.c(0) == -10.0);
    CHECK(lp.c(1) == -6.0);
    CHECK(lp.c(2) == 0.0);
    CHECK(lp.A(0, 0) == 1.0);
    CHECK(lp.A(0, 1) == 1.0);
    CHECK(lp.A(0, 2) == 1.0);
    CHECK(lp.b(0) == 1.0);
}

TEST_CASE("dimension mismatches are structural errors") {
    GeneralProblem p;
    p.objective = Vector{{1.0, 2.0}};
    p.eq_lhs = Matrix{{1.0}};  // wrong column count
    p.eq_rhs = Vector{{1.0}};
    CHECK_THROWS_AS(to_standard_form(p), StructuralError);

    GeneralProblem q;
    q.objective = Vector{{1.0}};
    q.eq_lhs = Matrix{{1.0}};
    q.eq_rhs = Vector{{1.0, 2.0}};  // wrong rhs length
    CHECK_THROWS_AS(to_standard_form(q), StructuralError);
}

TEST_CASE("presolve removes consistent duplicate rows") {
    StandardFormLP lp;
    lp.c = Vector{{1.0, 1.0}};
    lp.A = Matrix{{1.0, 1.0}, {2.0, 2.0}};
    lp.b = Vector{{1.0, 2.0}};
    lp.num_original = 2;
    lp.slack_begin = 2;
    auto [out, report] = presolve(lp);
    CHECK(out.A.rows() == 1);
    REQUIRE(report.removed_rows.size() == 1);
    CHECK(report.removed_rows[0] == 1);
    CHECK(report.scaling.size() == 1);
    CHECK(report.scaling.minCoeff() > 0.0);
}

TEST_CASE("presolve flags inconsistent duplicates as infeasible") {
    StandardFormLP lp;
    lp.c = Vector{{1.0, 1.0}};
    lp.A = Matrix{{1.0, 1.0}, {1.0, 1.0}};
    lp.b = Vector{{1.0, 2.0}};
    CHECK_THROWS_AS(presolve(lp), InfeasibleError);
}

TEST_CASE("presolve keeps a well-conditioned system up to scaling") {
    std::mt19937_64 rng(42);
    StandardFormLP lp = oracles::random_feasible_lp(rng, 8, 4);
    auto [out, report] = presolve(lp);
    REQUIRE(out.A.rows() == 4);
    CHECK(report.removed_rows.empty());
    // each row is the original row times its scaling factor
    for (Eigen::Index i = 0; i < 4; ++i) {
        CHECK((out.A.row(i) - report.scaling(i) * lp.A.row(i)).cwiseAbs().maxCoeff() < 1e-14);
        CHECK(out.A.row(i).cwiseAbs().maxCoeff() == Catch::Approx(1.0));
    }
    CHECK(check_full_row_rank(out.A));
}

TEST_CASE("presolve zero row handling") {
    StandardFormLP lp;
    lp.c = Vector{{1.0, 1.0}};
    lp.A = Matrix{{1.0, 2.0}, {0.0, 0.0}};
    lp.b = Vector{{1.0, 0.0}};
    auto [out, report] = presolve(lp);
    CHECK(out.A.rows() == 1);

    lp.b(1) = 1.0;  // 0 = 1
    CHECK_THROWS_AS(presolve(lp), InfeasibleError);
}

TEST_CASE("full row rank check") {
    CHECK(check_full_row_rank(Matrix::Identity(3, 3)));
    Matrix zero_row = Matrix::Identity(3, 3);
    zero_row.row(2).setZero();
    CHECK_FALSE(check_full_row_rank(zero_row));
    CHECK_FALSE(check_full_row_rank(Matrix{{1.0, 2.0}, {2.0, 4.0}}));
}

TEST_CASE("rank-deficient wide systems raise after presolve when inconsistent in rank") {
    StandardFormLP lp;
    lp.c = Vector{{1.0, 1.0, 1.0}};
    lp.A = Matrix{{1.0, 1.0, 0.0}, {0.0, 1.0, 1.0}};
    lp.b = Vector{{1.0, 1.0}};
    auto [out, report] = presolve(lp);  // independent rows survive
    CHECK(out.A.rows() == 2);
}

TEST_CASE("round trip: standard-form objective equals original objective") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        const Eigen::Index n = 2 + static_cast<Eigen::Index>(unif(rng) * 3);
        GeneralProblem p;
        p.objective.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) p.objective(i) = unif(rng) * 4.0 - 2.0;
        p.ub_lhs = Matrix::Zero(1, n);
        for (Eigen::Index i = 0; i < n; ++i) p.ub_lhs(0, i) = 0.5 + unif(rng);
        p.ub_rhs = Vector{{2.0}};
        p.sense = unif(rng) < 0.5 ? Sense::kMin : Sense::kMax;
        StandardFormLP lp = to_standard_form(p);

        Vector x_std = Vector::Zero(lp.num_vars());
        for (Eigen::Index i = 0; i < n; ++i) x_std(i) = unif(rng);
        x_std(n) = std::max(0.0, p.ub_rhs(0) - p.ub_lhs.row(0).dot(x_std.head(n)));

        const Vector x_orig = lp.to_original(x_std);
        const double orig_obj = p.objective.dot(x_orig);
        CHECK(lp.original_objective(x_std) ==
              Catch::Approx(orig_obj).epsilon(1e-12).margin(1e-14));
    }
}

TEST_CASE("standard form preserves the feasible region of original variables") {
    // vertex sets of tiny random problems agree between the forms
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> unif(0.2, 1.5);
    for (int trial = 0; trial < 20; ++trial) {
        GeneralProblem p;
        const Eigen::Index n = 2;
        p.objective = Vector{{unif(rng), unif(rng)}};
        p.ub_lhs = Matrix{{unif(rng), unif(rng)}, {unif(rng), unif(rng)}};
        p.ub_rhs = Vector{{1.0 + unif(rng), 1.0 + unif(rng)}};
        StandardFormLP lp = to_standard_form(p);

        auto std_best = oracles::vertex_enumeration(lp);
        REQUIRE(std_best.has_value());

        auto orig_vertices = oracles::original_form_vertices(p);
        REQUIRE_FALSE(orig_vertices.empty());
        double orig_best = std::numeric_limits<double>::infinity();
        Vector orig_arg;
        for (const auto& v : orig_vertices) {
            const double obj = p.objective.dot(v);
            if (obj < orig_best) {
                orig_best = obj;
                orig_arg = v;
            }
        }
        CHECK(std_best->objective == Catch::Approx(orig_best).margin(1e-9));
        CHECK((lp.to_original(std_best->x) - orig_arg).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("problem json round trip preserves fields") {
    GeneralProblem p;
    p.objective = Vector{{10.0, 6.0}};
    p.ub_lhs = Matrix{{1.0, 1.0}};
    p.ub_rhs = Vector{{1.0}};
    p.sense = Sense::kMax;
    p.integrality = {true, true};
    const Json j = problem_to_json(p);
    CHECK(j.at("sense") == "max");
    GeneralProblem q = problem_from_json(j);
    CHECK(q.objective == p.objective);
    CHECK(q.ub_lhs == p.ub_lhs);
    CHECK(q.integrality == p.integrality);

    Json missing;
    missing["sense"] = "min";
    CHECK_THROWS_AS(problem_from_json(missing), StructuralError);
}
