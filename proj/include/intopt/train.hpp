#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "intopt/errors.hpp"
#include "intopt/grad.hpp"
#include "intopt/hsd.hpp"
#include "intopt/predictor.hpp"
#include "intopt/problem.hpp"
#include "intopt/problems.hpp"

namespace intopt {

enum class TrainMethod { kTwoStage, kIntopt, kSpo };

inline const char* to_string(TrainMethod m) {
    switch (m) {
        case TrainMethod::kTwoStage: return "two-stage";
        case TrainMethod::kIntopt: return "intopt";
        case TrainMethod::kSpo: return "spo";
    }
    return "unknown";
}

struct TrainConfig {
    TrainMethod method = TrainMethod::kIntopt;
    int epochs = 20;
    int batch_size = 8;
    Eigen::Index hidden_dim = 0;  // 0 = linear model
    OptimizerKind optimizer = OptimizerKind::kAdam;
    double learning_rate = 1e-2;
    double weight_decay = 0.0;
    SolverConfig solver;
    GradConfig grad;
    std::uint64_t seed = 0;
};

struct EpochStats {
    int epoch = 0;
    double train_mse = 0.0;
    double val_mse = 0.0;
    double val_regret = 0.0;
    int failures = 0;
    double seconds = 0.0;
    double solver_iterations_mean = 0.0;
};

struct ExperimentRecord {
    std::vector<EpochStats> epochs;
};

/// regret = c.(x_hat - x_star) for minimization, sign flipped for
/// maximization; nonnegative whenever x_star is exactly optimal.
inline double regret(const Vector& costs, const Vector& x_hat, const Vector& x_star,
                     Sense sense = Sense::kMin) {
    if (costs.size() != x_hat.size() || costs.size() != x_star.size())
        throw StructuralError("regret vector length mismatch");
    const double diff = costs.dot(x_hat - x_star);
    return (sense == Sense::kMax) ? -diff : diff;
}

namespace detail {

struct LayerForward {
    StandardFormLP lp;
    LPSolution solution;
    Vector x_original;
};

/// Build, presolve and solve the instance LP at the given prediction-target
/// costs (mapped through the bundle's cost map when present).
inline LayerForward solve_layer(const ProblemBundle& bundle, const DatasetInstance& instance,
                                const Vector& target_costs, const SolverConfig& solver_cfg) {
    GeneralProblem gp = bundle.problem;
    gp.objective = bundle.lp_costs(target_costs);
    if (instance.rhs_override) {
        if (instance.rhs_override->size() != gp.eq_rhs.size())
            throw StructuralError("rhs override length mismatch");
        gp.eq_rhs = *instance.rhs_override;
    }
    LayerForward out;
    auto [lp, report] = presolve(to_standard_form(gp));
    out.lp = std::move(lp);
    out.solution = solve(out.lp, solver_cfg);
    if (out.solution.ok()) out.x_original = out.lp.to_original(out.solution.x);
    return out;
}

inline double mse(const Vector& prediction, const Vector& truth) {
    return (prediction - truth).squaredNorm() / static_cast<double>(truth.size());
}

/// Exact discrete optimum under the given prediction-target costs. Family
/// dispatch: DP for knapsack, shortest-path search (Bellman-Ford once
/// predictions go negative), exhaustive enumeration otherwise.
inline std::optional<Vector> discrete_oracle(const ProblemBundle& bundle,
                                             const DatasetInstance& instance,
                                             const Vector& target_costs) {
    switch (bundle.family) {
        case ProblemFamily::kKnapsack: {
            auto res = knapsack_oracle(target_costs, bundle.knapsack.costs,
                                       bundle.knapsack.budget);
            return res.x;
        }
        case ProblemFamily::kShortestPath: {
            ShortestPathSpec spec = bundle.graph;
            if (instance.rhs_override) {
                const Vector& rhs = *instance.rhs_override;
                spec.source = spec.num_nodes - 1;
                spec.dest = spec.num_nodes - 1;
                for (Eigen::Index i = 0; i < rhs.size(); ++i) {
                    if (rhs(i) > 0.5) spec.source = i;
                    if (rhs(i) < -0.5) spec.dest = i;
                }
            }
            std::optional<PathResult> res;
            if (target_costs.size() > 0 && target_costs.minCoeff() >= 0.0)
                res = dijkstra_oracle(spec, target_costs);
            else
                res = bellman_ford_oracle(spec, target_costs);
            if (!res) return std::nullopt;
            return res->x;
        }
        case ProblemFamily::kScheduling: {
            GeneralProblem gp = bundle.problem;
            gp.objective = bundle.lp_costs(target_costs);
            if (instance.rhs_override) gp.eq_rhs = *instance.rhs_override;
            auto res = brute_force_milp(gp);
            if (!res) return std::nullopt;
            return res->x;
        }
    }
    return std::nullopt;
}

}  // namespace detail

struct EvalMetrics {
    double mean_regret = 0.0;
    double mean_mse = 0.0;
    int evaluated = 0;
    int excluded = 0;  // oracle infeasibilities
};

/// Test-time protocol: predict, solve the discrete problem exactly under the
/// prediction and under the truth, report mean regret and mean MSE.
inline EvalMetrics evaluate(PredictorModel& model, const ProblemBundle& bundle,
                            const std::vector<size_t>& indices) {
    EvalMetrics metrics;
    const Sense sense = bundle.problem.sense;
    for (size_t idx : indices) {
        const DatasetInstance& inst = bundle.instances[idx];
        const Vector prediction = model.forward(inst.features);
        auto x_hat = detail::discrete_oracle(bundle, inst, prediction);
        auto x_star = detail::discrete_oracle(bundle, inst, inst.costs);
        if (!x_hat || !x_star) {
            metrics.excluded += 1;
            continue;
        }
        const Vector lp_costs_true = bundle.lp_costs(inst.costs);
        metrics.mean_regret += regret(lp_costs_true, *x_hat, *x_star, sense);
        metrics.mean_mse += detail::mse(prediction, inst.costs);
        metrics.evaluated += 1;
    }
    if (metrics.evaluated > 0) {
        metrics.mean_regret /= metrics.evaluated;
        metrics.mean_mse /= metrics.evaluated;
    }
    return metrics;
}

struct TrainResult {
    PredictorModel model;          // parameters from the best validation epoch
    PredictorModel final_model;    // parameters after the last epoch
    ExperimentRecord record;
    int best_epoch = -1;
};

namespace detail {

inline std::vector<size_t> shuffled(std::vector<size_t> indices, std::mt19937_64& rng) {
    std::shuffle(indices.begin(), indices.end(), rng);
    return indices;
}

/// Gradient of the task loss with respect to the prediction target, assembled
/// per method; nullopt flags a numerical failure on this instance.
inline std::optional<Vector> task_gradient(const ProblemBundle& bundle,
                                           const DatasetInstance& inst,
                                           const Vector& prediction, const TrainConfig& cfg,
                                           double* iterations_accum) {
    const double sign = (bundle.problem.sense == Sense::kMax) ? -1.0 : 1.0;
    if (cfg.method == TrainMethod::kIntopt) {
        try {
            LayerForward fwd = solve_layer(bundle, inst, prediction, cfg.solver);
            if (!fwd.solution.ok()) return std::nullopt;
            if (iterations_accum) *iterations_accum += fwd.solution.iterations;
            BackwardContext ctx(fwd.lp, fwd.solution, cfg.grad);
            const Vector grad_x_std = fwd.lp.embed_costs(bundle.lp_costs(inst.costs));
            const Vector grad_c_std = vjp(ctx, grad_x_std);
            Vector grad_lp = sign * grad_c_std.head(fwd.lp.num_original);
            if (bundle.cost_map.size() > 0) return Vector(bundle.cost_map * grad_lp);
            return grad_lp;
        } catch (const NumericalError&) {
            return std::nullopt;
        }
    }
    if (cfg.method == TrainMethod::kSpo) {
        try {
            const Vector lp_true = bundle.lp_costs(inst.costs);
            const Vector lp_pred = bundle.lp_costs(prediction);
            LayerForward at_true = solve_layer(bundle, inst, inst.costs, cfg.solver);
            if (!at_true.solution.ok()) return std::nullopt;
            if (iterations_accum) *iterations_accum += at_true.solution.iterations;
            // spo perturbation 2*chat - c expressed in prediction-target units
            const Vector perturbed = 2.0 * prediction - inst.costs;
            LayerForward at_pert = solve_layer(bundle, inst, perturbed, cfg.solver);
            if (!at_pert.solution.ok()) return std::nullopt;
            if (iterations_accum) *iterations_accum += at_pert.solution.iterations;
            Vector grad_lp = sign * (at_true.x_original - at_pert.x_original);
            if (bundle.cost_map.size() > 0) return Vector(bundle.cost_map * grad_lp);
            return grad_lp;
        } catch (const NumericalError&) {
            return std::nullopt;
        }
    }
    // two-stage: plain mse gradient
    return Vector(2.0 * (prediction - inst.costs) / static_cast<double>(inst.costs.size()));
}

}  // namespace detail

/// One training loop serves all three methods; they differ only in the
/// per-instance gradient with respect to the prediction. Numerical failures
/// skip the instance and are counted; an epoch where every instance fails
/// aborts.
inline TrainResult train(const ProblemBundle& bundle, const std::vector<size_t>& train_idx,
                         const std::vector<size_t>& val_idx, const TrainConfig& cfg) {
    if (train_idx.empty()) throw StructuralError("training set is empty");
    if (cfg.epochs < 1) throw StructuralError("epochs must be >= 1");
    const Eigen::Index input_dim = bundle.instances[train_idx.front()].features.size();
    const Eigen::Index output_dim = bundle.instances[train_idx.front()].costs.size();

    TrainResult result;
    PredictorModel model = PredictorModel::create(input_dim, output_dim, cfg.hidden_dim, cfg.seed);
    OptimizerState opt;
    opt.kind = cfg.optimizer;
    opt.learning_rate = cfg.learning_rate;
    opt.weight_decay = cfg.weight_decay;

    std::mt19937_64 shuffle_rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
    double best_metric = std::numeric_limits<double>::infinity();

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto start = std::chrono::steady_clock::now();
        EpochStats stats;
        stats.epoch = epoch;
        double iters_accum = 0.0;
        int solved = 0;

        std::vector<size_t> order = detail::shuffled(
            std::vector<size_t>(train_idx.begin(), train_idx.end()), shuffle_rng);
        int epoch_failures = 0;
        int epoch_used = 0;
        double train_mse_accum = 0.0;

        for (size_t pos = 0; pos < order.size();) {
            const size_t batch_end = std::min(order.size(), pos + static_cast<size_t>(cfg.batch_size));
            auto grads = model.zero_gradients();
            int batch_used = 0;
            for (; pos < batch_end; ++pos) {
                const DatasetInstance& inst = bundle.instances[order[pos]];
                const Vector prediction = model.forward(inst.features);
                train_mse_accum += detail::mse(prediction, inst.costs);
                auto grad_pred =
                    detail::task_gradient(bundle, inst, prediction, cfg, &iters_accum);
                if (!grad_pred) {
                    epoch_failures += 1;
                    continue;
                }
                auto inst_grads = model.backward(inst.features, *grad_pred);
                for (size_t l = 0; l < grads.size(); ++l) {
                    grads[l].weight += inst_grads[l].weight;
                    grads[l].bias += inst_grads[l].bias;
                }
                batch_used += 1;
                solved += 1;
            }
            if (batch_used > 0) {
                for (auto& g : grads) {
                    g.weight /= batch_used;
                    g.bias /= batch_used;
                }
                optimizer_step(opt, model, grads);
                epoch_used += batch_used;
            }
        }
        if (epoch_used == 0)
            throw NumericalError("every training instance failed numerically in epoch " +
                                 std::to_string(epoch));

        stats.failures = epoch_failures;
        stats.train_mse = train_mse_accum / static_cast<double>(order.size());
        stats.solver_iterations_mean = solved > 0 ? iters_accum / solved : 0.0;

        if (!val_idx.empty()) {
            EvalMetrics val = evaluate(model, bundle, val_idx);
            stats.val_mse = val.mean_mse;
            stats.val_regret = val.mean_regret;
            const double metric =
                (cfg.method == TrainMethod::kTwoStage) ? val.mean_mse : val.mean_regret;
            if (metric < best_metric) {
                best_metric = metric;
                result.model = model;
                result.best_epoch = epoch;
            }
        }
        stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        result.record.epochs.push_back(stats);
    }
    result.final_model = model;
    if (val_idx.empty() || result.best_epoch < 0) {
        result.model = model;
        result.best_epoch = cfg.epochs - 1;
    }
    return result;
}

inline TrainResult train_intopt(const ProblemBundle& bundle, const std::vector<size_t>& train_idx,
                                const std::vector<size_t>& val_idx, TrainConfig cfg) {
    cfg.method = TrainMethod::kIntopt;
    return train(bundle, train_idx, val_idx, cfg);
}

inline TrainResult train_twostage(const ProblemBundle& bundle, const std::vector<size_t>& train_idx,
                                  const std::vector<size_t>& val_idx, TrainConfig cfg) {
    cfg.method = TrainMethod::kTwoStage;
    return train(bundle, train_idx, val_idx, cfg);
}

inline TrainResult train_spo(const ProblemBundle& bundle, const std::vector<size_t>& train_idx,
                             const std::vector<size_t>& val_idx, TrainConfig cfg) {
    cfg.method = TrainMethod::kSpo;
    return train(bundle, train_idx, val_idx, cfg);
}

/// SPO subgradient with respect to the prediction target, exposed for direct
/// checks: x*(c) - x*(2 chat - c) in minimization orientation.
inline Vector spo_gradient(const ProblemBundle& bundle, const DatasetInstance& inst,
                           const Vector& prediction, const SolverConfig& solver_cfg) {
    TrainConfig cfg;
    cfg.method = TrainMethod::kSpo;
    cfg.solver = solver_cfg;
    auto grad = detail::task_gradient(bundle, inst, prediction, cfg, nullptr);
    if (!grad) throw NumericalError("spo gradient solve failed");
    return *grad;
}

}  // namespace intopt
