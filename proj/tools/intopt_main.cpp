#include <CLI11.hpp>
#include <exception>
#include <iostream>

#include "intopt/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Differentiable linear-programming layer: homogeneous self-dual "
                 "interior-point solver with analytic backward pass and an "
                 "end-to-end predict-and-optimize training harness"};
    app.require_subcommand(1);

    intopt::cli::SolveArgs solve_args;
    auto* solve = app.add_subcommand("solve", "Solve a problem JSON with the interior-point method");
    solve->add_option("problem", solve_args.problem_path, "problem JSON path")->required();
    solve->add_option("--out", solve_args.out_path, "solution output path");
    solve->add_option("--lambda-cutoff", solve_args.solver.lambda_cutoff, "barrier stopping threshold");
    solve->add_option("--max-iter", solve_args.solver.max_iterations, "iteration limit");
    solve->add_option("--gamma", solve_args.solver.gamma, "centering parameter");
    solve->add_option("--damping", solve_args.solver.damping, "Tikhonov base for retries");

    intopt::cli::GradCheckArgs gc_args;
    auto* gc = app.add_subcommand("grad-check",
                                  "Compare an analytic Jacobian against finite differences");
    gc->add_option("problem", gc_args.problem_path, "problem JSON path (default: bundled toy)");
    gc->add_option("--out", gc_args.out_path, "report output path");
    gc->add_option("--formulation", gc_args.formulation, "hsd | kkt-log | kkt-sq");
    gc->add_option("--lambda-cutoff", gc_args.lambda_cutoff, "forward stopping threshold / barrier weight");
    gc->add_option("--fd-step", gc_args.fd_step, "central difference step");
    gc->add_option("--damping", gc_args.damping, "backward Tikhonov damping");
    gc->add_option("--squared-weight", gc_args.squared_weight, "regularizer weight for kkt-sq");

    intopt::cli::GenArgs gen_args;
    auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset");
    gen->add_option("--problem", gen_args.problem, "knapsack | shortestpath | scheduling")->required();
    gen->add_option("--out", gen_args.out_prefix, "output prefix");
    gen->add_option("--seed", gen_args.seed, "generator seed");
    gen->add_option("--instances", gen_args.instances, "instance count");
    gen->add_option("--nodes", gen_args.nodes, "shortest path: node count");
    gen->add_option("--extra-edges", gen_args.extra_edges, "shortest path: edges beyond the chain");
    gen->add_option("--items", gen_args.items, "knapsack: item count");
    gen->add_option("--tasks", gen_args.tasks, "scheduling: task count");
    gen->add_option("--machines", gen_args.machines, "scheduling: machine count");
    gen->add_option("--timeslots", gen_args.timeslots, "scheduling: horizon length");
    gen->add_option("--noise", gen_args.noise, "target noise scale");
    gen->add_option("--nonlinearity", gen_args.nonlinearity, "knapsack: quadratic term weight");

    intopt::cli::TrainArgs train_args;
    auto* tr = app.add_subcommand("train", "Train a predictor on a dataset");
    tr->add_option("dataset", train_args.dataset_path, "dataset JSONL path")->required();
    tr->add_option("--spec", train_args.spec_path, "dataset spec path (default: <dataset>.spec.json)");
    tr->add_option("--out", train_args.out_prefix, "output prefix");
    tr->add_option("--method", train_args.method, "two-stage | intopt | spo");
    tr->add_option("--epochs", train_args.epochs, "epoch count");
    tr->add_option("--lr", train_args.lr, "learning rate");
    tr->add_option("--batch", train_args.batch, "batch size");
    tr->add_option("--lambda-cutoff", train_args.lambda_cutoff, "forward stopping threshold");
    tr->add_option("--damping", train_args.damping, "backward Tikhonov damping");
    tr->add_option("--formulation", train_args.formulation, "hsd | kkt-log | kkt-sq");
    tr->add_option("--hidden", train_args.hidden, "hidden width (0 = linear)");
    tr->add_option("--val-fraction", train_args.val_fraction, "validation share of the dataset");
    tr->add_option("--seed", train_args.seed, "training seed");

    intopt::cli::EvalArgs eval_args;
    auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint with the exact oracles");
    ev->add_option("--model", eval_args.model_path, "checkpoint path")->required();
    ev->add_option("--dataset", eval_args.dataset_path, "dataset JSONL path")->required();
    ev->add_option("--spec", eval_args.spec_path, "dataset spec path");
    ev->add_option("--out", eval_args.out_path, "metrics output path");

    intopt::cli::BenchArgs bench_args;
    int bench_seeds = 0;
    std::uint64_t bench_master = 0;
    int bench_workers = 0;
    auto* be = app.add_subcommand("bench", "Run a method/seed comparison from a config file");
    be->add_option("config", bench_args.config_path, "bench config JSON")->required();
    be->add_option("--out-dir", bench_args.out_dir, "output directory");
    auto* seeds_opt = be->add_option("--seeds", bench_seeds, "override seed count");
    auto* master_opt = be->add_option("--master-seed", bench_master, "override master seed");
    auto* workers_opt = be->add_option("--workers", bench_workers, "concurrent runs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : intopt::cli::kUsage;
    }

    try {
        if (solve->parsed()) return intopt::cli::cmd_solve(solve_args);
        if (gc->parsed()) return intopt::cli::cmd_grad_check(gc_args);
        if (gen->parsed()) return intopt::cli::cmd_gen(gen_args);
        if (tr->parsed()) return intopt::cli::cmd_train(train_args);
        if (ev->parsed()) return intopt::cli::cmd_eval(eval_args);
        if (be->parsed()) {
            if (*seeds_opt) bench_args.seeds = bench_seeds;
            if (*master_opt) bench_args.master_seed = bench_master;
            if (*workers_opt) bench_args.workers = bench_workers;
            return intopt::cli::cmd_bench(bench_args);
        }
    } catch (const intopt::StructuralError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return intopt::cli::kUsage;
    } catch (const intopt::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return intopt::cli::kFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return intopt::cli::kFailure;
    }
    return intopt::cli::kUsage;
}
