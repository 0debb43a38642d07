#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "intopt/predictor.hpp"

using namespace intopt;

TEST_CASE("identity linear model passes inputs through") {
    PredictorModel model = PredictorModel::zeros(3, 3, 0);
    model.layers()[0].weight = Matrix::Identity(3, 3);
    const Vector z{{0.3, -1.2, 2.0}};
    CHECK((model.forward(z) - z).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("zero-weight hidden model outputs its bias") {
    PredictorModel model = PredictorModel::zeros(4, 2, 8);
    model.layers()[1].bias = Vector{{0.7, -0.3}};
    const Vector out = model.forward(Vector::Random(4));
    CHECK(out(0) == Catch::Approx(0.7));
    CHECK(out(1) == Catch::Approx(-0.3));
}

TEST_CASE("forward matches hand arithmetic") {
    PredictorModel model = PredictorModel::zeros(2, 2, 2);
    model.layers()[0].weight = Matrix{{1.0, -1.0}, {0.5, 2.0}};
    model.layers()[0].bias = Vector{{0.1, -0.2}};
    model.layers()[1].weight = Matrix{{2.0, 0.0}, {1.0, 1.0}};
    model.layers()[1].bias = Vector{{0.0, 0.5}};
    const Vector z{{1.0, 0.5}};
    // pre1 = (0.6, 1.3) -> relu same; out = (1.2, 0.6+1.3+0.5)
    const Vector out = model.forward(z);
    CHECK(out(0) == Catch::Approx(1.2));
    CHECK(out(1) == Catch::Approx(2.4));
}

TEST_CASE("backward requires a cached forward for the same input") {
    PredictorModel model = PredictorModel::create(3, 2, 0, 1);
    CHECK_THROWS_AS(model.backward(Vector::Ones(3), Vector::Ones(2)), StructuralError);
    model.forward(Vector::Ones(3));
    CHECK_THROWS_AS(model.backward(2.0 * Vector::Ones(3), Vector::Ones(2)), StructuralError);
    CHECK_NOTHROW(model.backward(Vector::Ones(3), Vector::Ones(2)));
}

TEST_CASE("zero output gradient gives zero parameter gradients") {
    PredictorModel model = PredictorModel::create(3, 2, 4, 7);
    const Vector z = Vector::Random(3);
    model.forward(z);
    auto grads = model.backward(z, Vector::Zero(2));
    for (const auto& g : grads) {
        CHECK(g.weight.cwiseAbs().maxCoeff() == 0.0);
        CHECK(g.bias.cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("linear layer gradient is the outer product") {
    PredictorModel model = PredictorModel::create(3, 2, 0, 11);
    const Vector z{{0.5, -1.0, 2.0}};
    const Vector g{{1.0, -2.0}};
    model.forward(z);
    auto grads = model.backward(z, g);
    REQUIRE(grads.size() == 1);
    CHECK((grads[0].weight - g * z.transpose()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((grads[0].bias - g).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("manual backprop matches central finite differences") {
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const double step = 1e-6;
    int checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index in = 2 + trial % 3;
        const Eigen::Index out = 1 + trial % 2;
        const Eigen::Index hidden = (trial % 2 == 0) ? 0 : 4;
        PredictorModel model = PredictorModel::create(in, out, hidden, 1000 + trial);
        Vector z(in), g(out);
        for (Eigen::Index i = 0; i < in; ++i) z(i) = unif(rng);
        for (Eigen::Index i = 0; i < out; ++i) g(i) = unif(rng);

        model.forward(z);
        auto grads = model.backward(z, g);

        auto loss = [&](PredictorModel& m) { return g.dot(m.forward(z)); };
        for (size_t layer = 0; layer < model.layers().size(); ++layer) {
            Matrix& w = model.layers()[layer].weight;
            for (Eigen::Index r = 0; r < w.rows(); ++r)
                for (Eigen::Index c = 0; c < w.cols(); ++c) {
                    const double keep = w(r, c);
                    w(r, c) = keep + step;
                    const double up = loss(model);
                    w(r, c) = keep - step;
                    const double down = loss(model);
                    w(r, c) = keep;
                    const double fd = (up - down) / (2.0 * step);
                    const double an = grads[layer].weight(r, c);
                    if (std::abs(an) > 1e-8) {
                        CHECK(std::abs(fd - an) / std::abs(an) < 1e-5);
                        ++checked;
                    }
                }
            Vector& b = model.layers()[layer].bias;
            for (Eigen::Index r = 0; r < b.size(); ++r) {
                const double keep = b(r);
                b(r) = keep + step;
                const double up = loss(model);
                b(r) = keep - step;
                const double down = loss(model);
                b(r) = keep;
                const double fd = (up - down) / (2.0 * step);
                const double an = grads[layer].bias(r);
                if (std::abs(an) > 1e-8) {
                    CHECK(std::abs(fd - an) / std::abs(an) < 1e-5);
                    ++checked;
                }
            }
        }
    }
    CHECK(checked > 500);
}

TEST_CASE("sgd and adam updates") {
    SECTION("zero gradient leaves parameters unchanged") {
        for (OptimizerKind kind : {OptimizerKind::kSgd, OptimizerKind::kAdam}) {
            PredictorModel model = PredictorModel::create(2, 2, 0, 3);
            const Matrix before = model.layers()[0].weight;
            OptimizerState st;
            st.kind = kind;
            st.learning_rate = 0.1;
            optimizer_step(st, model, model.zero_gradients());
            CHECK((model.layers()[0].weight - before).cwiseAbs().maxCoeff() == 0.0);
        }
    }
    SECTION("sgd moves against the gradient by lr") {
        PredictorModel model = PredictorModel::zeros(1, 1, 0);
        OptimizerState st = OptimizerState::sgd(0.1);
        auto grads = model.zero_gradients();
        grads[0].weight(0, 0) = 1.0;
        optimizer_step(st, model, grads);
        CHECK(model.layers()[0].weight(0, 0) == Catch::Approx(-0.1));
    }
    SECTION("first adam step is close to lr times the gradient sign") {
        PredictorModel model = PredictorModel::zeros(1, 1, 0);
        OptimizerState st = OptimizerState::adam(0.01);
        auto grads = model.zero_gradients();
        const double g = 3.7;
        grads[0].weight(0, 0) = g;
        optimizer_step(st, model, grads);
        const double expected = -0.01 * g / (std::abs(g) + 1e-8);
        CHECK(model.layers()[0].weight(0, 0) == Catch::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("weight decay folds an l2 term into the gradient") {
    PredictorModel model = PredictorModel::zeros(1, 1, 0);
    model.layers()[0].weight(0, 0) = 2.0;
    OptimizerState st = OptimizerState::sgd(0.1, /*weight_decay=*/0.5);
    optimizer_step(st, model, model.zero_gradients());
    CHECK(model.layers()[0].weight(0, 0) == Catch::Approx(2.0 - 0.1 * 0.5 * 2.0));
}

TEST_CASE("seeded init is deterministic and scaled by fan-in") {
    PredictorModel a = PredictorModel::create(16, 4, 8, 99);
    PredictorModel b = PredictorModel::create(16, 4, 8, 99);
    PredictorModel c = PredictorModel::create(16, 4, 8, 100);
    CHECK((a.layers()[0].weight.array() == b.layers()[0].weight.array()).all());
    CHECK_FALSE((a.layers()[0].weight.array() == c.layers()[0].weight.array()).all());
    CHECK(a.layers()[0].weight.cwiseAbs().maxCoeff() <= 1.0 / 4.0);  // 1/sqrt(16)
    CHECK(a.layers()[1].weight.cwiseAbs().maxCoeff() <= 1.0 / std::sqrt(8.0));
}
