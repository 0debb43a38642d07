#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "intopt/train.hpp"
#include "oracles.hpp"

using namespace intopt;

namespace {

/// Tiny identity task: features are the true costs, so a linear model can be
/// exact and the truth-initialized model predicts perfectly.
ProblemBundle identity_shortestpath_bundle(std::uint64_t seed, Eigen::Index n_instances) {
    ShortestPathGenConfig cfg;
    cfg.seed = seed;
    cfg.num_nodes = 6;
    cfg.extra_edges = 5;
    cfg.num_instances = n_instances;
    cfg.noise = 0.1;
    ProblemBundle bundle = gen_shortestpath_dataset(cfg);
    for (auto& inst : bundle.instances) inst.features = inst.costs;
    return bundle;
}

std::vector<size_t> range_indices(size_t begin, size_t end) {
    std::vector<size_t> out;
    for (size_t i = begin; i < end; ++i) out.push_back(i);
    return out;
}

}  // namespace

TEST_CASE("regret definition") {
    CHECK(regret(Vector{{1.0, 2.0}}, Vector{{1.0, 0.0}}, Vector{{1.0, 0.0}}) == 0.0);
    CHECK(regret(Vector{{1.0, 2.0}}, Vector{{0.0, 1.0}}, Vector{{1.0, 0.0}}) ==
          Catch::Approx(1.0));
    // knapsack in max sense: true pick item 1 (value 10), predicted pick item 2
    CHECK(regret(Vector{{10.0, 6.0}}, Vector{{0.0, 1.0}}, Vector{{1.0, 0.0}}, Sense::kMax) ==
          Catch::Approx(4.0));
    CHECK_THROWS_AS(regret(Vector{{1.0}}, Vector{{1.0, 2.0}}, Vector{{1.0}}), StructuralError);
}

TEST_CASE("evaluate: perfect predictions give zero regret") {
    ProblemBundle bundle = identity_shortestpath_bundle(1, 6);
    PredictorModel model = PredictorModel::zeros(bundle.instances[0].features.size(),
                                                 bundle.instances[0].costs.size(), 0);
    model.layers()[0].weight = Matrix::Identity(model.layers()[0].weight.rows(),
                                                model.layers()[0].weight.cols());
    EvalMetrics metrics = evaluate(model, bundle, range_indices(0, 6));
    CHECK(metrics.evaluated == 6);
    CHECK(metrics.mean_regret == Catch::Approx(0.0).margin(1e-12));
    CHECK(metrics.mean_mse == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("evaluate: knapsack toy with swapped predictions") {
    ProblemBundle bundle;
    bundle.family = ProblemFamily::kKnapsack;
    bundle.knapsack.costs = Vector{{1.0, 1.0}};
    bundle.knapsack.budget = 1.0;
    bundle.problem = knapsack_to_lp(bundle.knapsack, Vector::Ones(2));
    DatasetInstance inst;
    inst.features = Vector{{6.0, 10.0}};  // identity model will predict these
    inst.costs = Vector{{10.0, 6.0}};
    bundle.instances.push_back(inst);

    PredictorModel model = PredictorModel::zeros(2, 2, 0);
    model.layers()[0].weight = Matrix::Identity(2, 2);
    EvalMetrics metrics = evaluate(model, bundle, {0});
    CHECK(metrics.mean_regret == Catch::Approx(4.0));
}

TEST_CASE("evaluate: single-edge path has zero regret regardless of prediction") {
    ProblemBundle bundle;
    bundle.family = ProblemFamily::kShortestPath;
    bundle.graph.num_nodes = 2;
    bundle.graph.edges = {{0, 1}};
    bundle.graph.source = 0;
    bundle.graph.dest = 1;
    bundle.problem = shortestpath_to_lp(bundle.graph, Vector::Ones(1));
    DatasetInstance inst;
    inst.features = Vector{{123.0}};
    inst.costs = Vector{{5.0}};
    bundle.instances.push_back(inst);
    PredictorModel model = PredictorModel::create(1, 1, 0, 3);
    EvalMetrics metrics = evaluate(model, bundle, {0});
    CHECK(metrics.mean_regret == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("regret nonnegativity with exact oracles") {
    ProblemBundle bundle = identity_shortestpath_bundle(5, 10);
    PredictorModel model = PredictorModel::create(bundle.instances[0].features.size(),
                                                  bundle.instances[0].costs.size(), 0, 17);
    for (size_t i = 0; i < bundle.instances.size(); ++i) {
        const DatasetInstance& inst = bundle.instances[i];
        const Vector prediction = model.forward(inst.features);
        auto x_hat = detail::discrete_oracle(bundle, inst, prediction);
        auto x_star = detail::discrete_oracle(bundle, inst, inst.costs);
        REQUIRE(x_hat.has_value());
        REQUIRE(x_star.has_value());
        CHECK(regret(inst.costs, *x_hat, *x_star) >= -1e-9);
    }
}

TEST_CASE("discrete decisions are invariant to positive scaling of predictions") {
    ProblemBundle bundle = identity_shortestpath_bundle(7, 8);
    for (const auto& inst : bundle.instances) {
        auto base = detail::discrete_oracle(bundle, inst, inst.costs);
        auto scaled = detail::discrete_oracle(bundle, inst, Vector(7.3 * inst.costs));
        REQUIRE(base.has_value());
        REQUIRE(scaled.has_value());
        CHECK((*base - *scaled).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("spo gradient vanishes exactly at the truth") {
    ProblemBundle bundle = identity_shortestpath_bundle(9, 4);
    for (const auto& inst : bundle.instances) {
        SolverConfig solver;
        solver.lambda_cutoff = 0.1;
        const Vector grad = spo_gradient(bundle, inst, inst.costs, solver);
        CHECK(grad.cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("spo gradient points toward the true knapsack picks") {
    ProblemBundle bundle;
    bundle.family = ProblemFamily::kKnapsack;
    bundle.knapsack.costs = Vector{{1.0, 1.0}};
    bundle.knapsack.budget = 1.0;
    bundle.problem = knapsack_to_lp(bundle.knapsack, Vector::Ones(2));
    DatasetInstance inst;
    inst.features = Vector{{1.0, 1.0}};
    inst.costs = Vector{{10.0, 6.0}};
    bundle.instances.push_back(inst);

    SolverConfig solver;
    const Vector prediction{{6.0, 10.0}};  // ranks the items oppositely
    const Vector grad = spo_gradient(bundle, inst, prediction, solver);
    CHECK(grad.cwiseAbs().maxCoeff() > 0.1);
    // descent direction -grad raises the predicted value of the true item
    CHECK(-grad(0) > 0.0);
    CHECK(-grad(1) < 0.0);
}

TEST_CASE("intopt gradient is small at a truth-initialized model") {
    ProblemBundle bundle = identity_shortestpath_bundle(11, 4);
    TrainConfig cfg;
    cfg.method = TrainMethod::kIntopt;
    cfg.solver.lambda_cutoff = 0.1;
    const DatasetInstance& inst = bundle.instances[0];

    auto grad_true = detail::task_gradient(bundle, inst, inst.costs, cfg, nullptr);
    REQUIRE(grad_true.has_value());
    Vector shuffled = inst.costs.reverse();
    auto grad_off = detail::task_gradient(bundle, inst, shuffled, cfg, nullptr);
    REQUIRE(grad_off.has_value());
    CHECK(grad_true->norm() < 0.5 * grad_off->norm());
}

TEST_CASE("training is deterministic under a fixed seed") {
    ProblemBundle bundle = identity_shortestpath_bundle(13, 8);
    TrainConfig cfg;
    cfg.method = TrainMethod::kIntopt;
    cfg.epochs = 2;
    cfg.batch_size = 4;
    cfg.learning_rate = 0.05;
    cfg.solver.lambda_cutoff = 0.1;
    cfg.seed = 42;
    auto a = train(bundle, range_indices(0, 6), range_indices(6, 8), cfg);
    auto b = train(bundle, range_indices(0, 6), range_indices(6, 8), cfg);
    REQUIRE(a.record.epochs.size() == b.record.epochs.size());
    for (size_t e = 0; e < a.record.epochs.size(); ++e) {
        CHECK(a.record.epochs[e].train_mse == b.record.epochs[e].train_mse);
        CHECK(a.record.epochs[e].val_regret == b.record.epochs[e].val_regret);
        CHECK(a.record.epochs[e].failures == b.record.epochs[e].failures);
    }
    for (size_t l = 0; l < a.final_model.layers().size(); ++l)
        CHECK((a.final_model.layers()[l].weight.array() ==
               b.final_model.layers()[l].weight.array())
                  .all());
}

TEST_CASE("two-stage training fits a realizable linear ground truth") {
    // c = W z exactly; a linear model driven to near-zero mse and zero regret
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> unif(0.2, 1.0);
    ShortestPathGenConfig gen;
    gen.seed = 21;
    gen.num_nodes = 5;
    gen.extra_edges = 4;
    gen.num_instances = 24;
    ProblemBundle bundle = gen_shortestpath_dataset(gen);
    const Eigen::Index m = bundle.instances[0].costs.size();
    Matrix w_true(m, 3);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < 3; ++j) w_true(i, j) = unif(rng);
    for (auto& inst : bundle.instances) {
        Vector z(3);
        for (Eigen::Index j = 0; j < 3; ++j) z(j) = unif(rng);
        inst.features = z;
        inst.costs = w_true * z;
    }

    TrainConfig cfg;
    cfg.method = TrainMethod::kTwoStage;
    cfg.epochs = 400;
    cfg.batch_size = 24;
    cfg.learning_rate = 0.05;
    cfg.seed = 7;
    auto result = train(bundle, range_indices(0, 20), range_indices(20, 24), cfg);
    CHECK(result.record.epochs.back().train_mse < 1e-3);
    EvalMetrics metrics = evaluate(result.final_model, bundle, range_indices(20, 24));
    CHECK(metrics.mean_regret == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("two-stage learns constant targets through the bias") {
    ProblemBundle bundle;
    bundle.family = ProblemFamily::kShortestPath;
    bundle.graph.num_nodes = 3;
    bundle.graph.edges = {{0, 1}, {1, 2}, {0, 2}};
    bundle.graph.source = 0;
    bundle.graph.dest = 2;
    bundle.problem = shortestpath_to_lp(bundle.graph, Vector::Ones(3));
    for (int i = 0; i < 8; ++i) {
        DatasetInstance inst;
        inst.features = Vector{{static_cast<double>(i % 3)}};
        inst.costs = Vector{{1.0, 2.0, 4.0}};
        bundle.instances.push_back(inst);
    }
    TrainConfig cfg;
    cfg.method = TrainMethod::kTwoStage;
    cfg.epochs = 300;
    cfg.learning_rate = 0.05;
    auto result = train(bundle, range_indices(0, 8), {}, cfg);
    CHECK(result.record.epochs.back().train_mse < 1e-4);
}

TEST_CASE("intopt training reduces validation regret on a learnable task") {
    ShortestPathGenConfig gen;
    gen.seed = 31;
    gen.num_nodes = 7;
    gen.extra_edges = 8;
    gen.num_instances = 30;
    gen.noise = 0.2;
    ProblemBundle bundle = gen_shortestpath_dataset(gen);
    TrainConfig cfg;
    cfg.method = TrainMethod::kIntopt;
    cfg.epochs = 10;
    cfg.batch_size = 6;
    cfg.learning_rate = 0.3;
    cfg.solver.lambda_cutoff = 0.1;
    cfg.seed = 3;
    auto result = train(bundle, range_indices(0, 24), range_indices(24, 30), cfg);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& row : result.record.epochs) best = std::min(best, row.val_regret);
    CHECK(best <= result.record.epochs.front().val_regret + 1e-12);
    CHECK(result.best_epoch >= 0);
}

TEST_CASE("rhs overrides flow through training instance solves") {
    ProblemBundle bundle = identity_shortestpath_bundle(17, 6);
    bool has_override = false;
    for (const auto& inst : bundle.instances) has_override |= inst.rhs_override.has_value();
    CHECK(has_override);
    TrainConfig cfg;
    cfg.method = TrainMethod::kIntopt;
    cfg.epochs = 1;
    cfg.solver.lambda_cutoff = 0.1;
    CHECK_NOTHROW(train(bundle, range_indices(0, 5), range_indices(5, 6), cfg));
}
