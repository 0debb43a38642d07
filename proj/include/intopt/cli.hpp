#pragma once

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "intopt/bench.hpp"
#include "intopt/gradcheck.hpp"
#include "intopt/json_io.hpp"
#include "intopt/manifest.hpp"
#include "intopt/train.hpp"

namespace intopt::cli {

// Exit codes: 0 success, 1 runtime/numerical failure, 2 bad inputs.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;
inline constexpr int kUsage = 2;

struct SolveArgs {
    std::string problem_path;
    std::string out_path = "solution.json";
    SolverConfig solver;
};

inline int cmd_solve(const SolveArgs& args) {
    if (!std::filesystem::exists(args.problem_path)) {
        std::cerr << "error: problem file not found: " << args.problem_path << "\n";
        return kUsage;
    }
    RunManifest manifest;
    manifest.subcommand = "solve";
    manifest.add_input(args.problem_path);
    manifest.config = Json{{"lambda_cutoff", args.solver.lambda_cutoff},
                           {"max_iter", args.solver.max_iterations},
                           {"gamma", args.solver.gamma},
                           {"damping", args.solver.damping}};
    manifest.outputs.push_back(args.out_path);

    GeneralProblem gp = problem_from_json(Json::parse(read_text_file(args.problem_path)));
    auto [lp, report] = presolve(to_standard_form(gp));
    LPSolution sol = solve(lp, args.solver);
    Json out = solution_to_json(lp, sol);
    out["presolve_removed_rows"] = report.removed_rows.size();
    out["manifest"] = manifest.to_json();
    write_text_file(args.out_path, out.dump(2) + "\n");
    std::cout << "status: " << to_string(sol.status) << "  objective: "
              << lp.original_objective(sol.x) << "  iterations: " << sol.iterations << "\n";
    return sol.ok() ? kOk : kFailure;
}

struct GradCheckArgs {
    std::string problem_path;  // empty -> bundled toy problem
    std::string out_path = "grad_check.json";
    std::string formulation = "hsd";
    double lambda_cutoff = 0.1;
    double fd_step = 1e-4;
    double damping = 0.0;
    double squared_weight = 0.1;
};

/// A small feasible bounded LP used when no problem file is given.
inline GeneralProblem bundled_toy_problem() {
    GeneralProblem p;
    p.objective = Vector{{1.0, 2.0, 0.5, 1.5}};
    p.eq_lhs = Matrix{{1.0, 1.0, 1.0, 0.0}, {0.0, 0.5, 1.0, 1.0}};
    p.eq_rhs = Vector{{2.0, 1.5}};
    p.sense = Sense::kMin;
    return p;
}

inline int cmd_grad_check(const GradCheckArgs& args) {
    RunManifest manifest;
    manifest.subcommand = "grad-check";
    GeneralProblem gp;
    if (args.problem_path.empty()) {
        gp = bundled_toy_problem();
    } else {
        if (!std::filesystem::exists(args.problem_path)) {
            std::cerr << "error: problem file not found: " << args.problem_path << "\n";
            return kUsage;
        }
        manifest.add_input(args.problem_path);
        gp = problem_from_json(Json::parse(read_text_file(args.problem_path)));
    }
    manifest.config = Json{{"formulation", args.formulation},
                           {"lambda_cutoff", args.lambda_cutoff},
                           {"fd_step", args.fd_step},
                           {"damping", args.damping},
                           {"squared_weight", args.squared_weight}};
    manifest.outputs.push_back(args.out_path);

    auto [lp, report] = presolve(to_standard_form(gp));
    SolverConfig solver;
    solver.lambda_cutoff = args.lambda_cutoff;
    GradConfig grad;
    grad.damping = args.damping;

    GradCheckReport check;
    if (args.formulation == "hsd") {
        grad.formulation = GradFormulation::kHsd;
        check = grad_check_hsd(lp, solver, grad, args.fd_step);
    } else if (args.formulation == "kkt-log") {
        grad.formulation = GradFormulation::kKktLogBarrier;
        check = grad_check_kkt_logbarrier(lp, args.lambda_cutoff, grad, args.fd_step);
    } else if (args.formulation == "kkt-sq") {
        grad.formulation = GradFormulation::kKktSquared;
        check = grad_check_kkt_squared(lp, args.squared_weight, solver, args.fd_step);
    } else {
        std::cerr << "error: unknown formulation: " << args.formulation << "\n";
        return kUsage;
    }

    Json out;
    out["formulation"] = args.formulation;
    Json cosines = Json::array();
    for (double c : check.column_cosines) cosines.push_back(c);
    out["column_cosines"] = cosines;
    out["fraction_passing"] = check.fraction_passing;
    out["max_relative_error"] = check.max_relative_error;
    out["manifest"] = manifest.to_json();
    write_text_file(args.out_path, out.dump(2) + "\n");
    std::cout << "formulation " << args.formulation << ": " << check.fraction_passing * 100.0
              << "% of columns at cosine >= 0.99, max relative error "
              << check.max_relative_error << "\n";
    return kOk;
}

struct GenArgs {
    std::string problem = "shortestpath";
    std::string out_prefix = "dataset";
    std::uint64_t seed = 0;
    Eigen::Index instances = 80;
    Eigen::Index nodes = 8;
    Eigen::Index extra_edges = 10;
    Eigen::Index items = 10;
    Eigen::Index tasks = 3;
    Eigen::Index machines = 2;
    int timeslots = 8;
    double noise = 0.1;
    double nonlinearity = 1.0;
};

inline int cmd_gen(const GenArgs& args) {
    RunManifest manifest;
    manifest.subcommand = "gen";
    manifest.seed = args.seed;
    manifest.config = Json{{"problem", args.problem}, {"seed", args.seed},
                           {"instances", args.instances}, {"noise", args.noise}};

    ProblemBundle bundle;
    if (args.problem == "shortestpath") {
        ShortestPathGenConfig cfg;
        cfg.seed = args.seed;
        cfg.num_instances = args.instances;
        cfg.num_nodes = args.nodes;
        cfg.extra_edges = args.extra_edges;
        cfg.noise = args.noise;
        bundle = gen_shortestpath_dataset(cfg);
    } else if (args.problem == "knapsack") {
        KnapsackGenConfig cfg;
        cfg.seed = args.seed;
        cfg.num_instances = args.instances;
        cfg.num_items = args.items;
        cfg.noise = args.noise;
        cfg.nonlinearity = args.nonlinearity;
        bundle = gen_knapsack_dataset(cfg);
    } else if (args.problem == "scheduling") {
        SchedulingGenConfig cfg;
        cfg.seed = args.seed;
        cfg.num_instances = args.instances;
        cfg.num_tasks = args.tasks;
        cfg.num_machines = args.machines;
        cfg.num_timeslots = args.timeslots;
        cfg.noise = args.noise;
        bundle = gen_scheduling_dataset(cfg);
    } else {
        std::cerr << "error: unknown problem family: " << args.problem << "\n";
        return kUsage;
    }

    const std::string dataset_path = args.out_prefix + ".jsonl";
    const std::string spec_path = args.out_prefix + ".spec.json";
    manifest.outputs = {dataset_path, spec_path};
    save_bundle(bundle, dataset_path, spec_path);
    write_text_file(args.out_prefix + ".manifest.json", manifest.to_json().dump(2) + "\n");
    std::cout << "wrote " << bundle.instances.size() << " instances to " << dataset_path << "\n";
    return kOk;
}

struct TrainArgs {
    std::string dataset_path;
    std::string spec_path;  // empty -> "<dataset stem>.spec.json"
    std::string out_prefix = "run";
    std::string method = "intopt";
    std::string formulation = "hsd";
    int epochs = 20;
    int batch = 8;
    double lr = 1e-2;
    double lambda_cutoff = 0.1;
    double damping = 0.0;
    Eigen::Index hidden = 0;
    double val_fraction = 0.2;
    std::uint64_t seed = 0;
};

inline std::string default_spec_path(const std::string& dataset_path) {
    std::filesystem::path p(dataset_path);
    p.replace_extension("");
    return p.string() + ".spec.json";
}

inline TrainConfig make_train_config(const TrainArgs& args) {
    TrainConfig cfg;
    cfg.method = detail::method_from_string(args.method);
    cfg.epochs = args.epochs;
    cfg.batch_size = args.batch;
    cfg.learning_rate = args.lr;
    cfg.hidden_dim = args.hidden;
    cfg.seed = args.seed;
    cfg.solver.lambda_cutoff = args.lambda_cutoff;
    cfg.grad.damping = args.damping;
    if (args.formulation == "hsd") cfg.grad.formulation = GradFormulation::kHsd;
    else if (args.formulation == "kkt-log") cfg.grad.formulation = GradFormulation::kKktLogBarrier;
    else if (args.formulation == "kkt-sq") cfg.grad.formulation = GradFormulation::kKktSquared;
    else throw StructuralError("unknown formulation: " + args.formulation);
    return cfg;
}

inline int cmd_train(const TrainArgs& args) {
    if (!std::filesystem::exists(args.dataset_path)) {
        std::cerr << "error: dataset not found: " << args.dataset_path << "\n";
        return kUsage;
    }
    const std::string spec_path =
        args.spec_path.empty() ? default_spec_path(args.dataset_path) : args.spec_path;
    if (!std::filesystem::exists(spec_path)) {
        std::cerr << "error: dataset spec not found: " << spec_path << "\n";
        return kUsage;
    }

    RunManifest manifest;
    manifest.subcommand = "train";
    manifest.seed = args.seed;
    manifest.add_input(args.dataset_path);
    manifest.add_input(spec_path);
    manifest.config = Json{{"method", args.method},   {"epochs", args.epochs},
                           {"lr", args.lr},           {"batch", args.batch},
                           {"lambda_cutoff", args.lambda_cutoff},
                           {"damping", args.damping}, {"formulation", args.formulation},
                           {"hidden", args.hidden},   {"val_fraction", args.val_fraction},
                           {"seed", args.seed}};

    ProblemBundle bundle = load_bundle(args.dataset_path, spec_path);
    TrainConfig cfg = make_train_config(args);

    const size_t n = bundle.instances.size();
    const size_t n_val = static_cast<size_t>(args.val_fraction * static_cast<double>(n));
    std::vector<size_t> train_idx, val_idx;
    for (size_t i = 0; i < n; ++i)
        (i < n - n_val ? train_idx : val_idx).push_back(i);

    TrainResult result = train(bundle, train_idx, val_idx, cfg);

    const std::string checkpoint_path = args.out_prefix + ".checkpoint.json";
    const std::string curve_path = args.out_prefix + ".curve.csv";
    manifest.outputs = {checkpoint_path, curve_path};
    OptimizerState opt;
    opt.kind = cfg.optimizer;
    opt.learning_rate = cfg.learning_rate;
    Json checkpoint = checkpoint_to_json(result.model, opt);
    checkpoint["best_epoch"] = result.best_epoch;
    checkpoint["manifest"] = manifest.to_json();
    write_text_file(checkpoint_path, checkpoint.dump(2) + "\n");
    write_text_file(curve_path, detail::curve_csv(result.record));
    write_text_file(args.out_prefix + ".manifest.json", manifest.to_json().dump(2) + "\n");

    const auto& last = result.record.epochs.back();
    std::cout << "trained " << args.method << " for " << args.epochs
              << " epochs; best epoch " << result.best_epoch
              << "; final val regret " << last.val_regret << ", val mse " << last.val_mse << "\n";
    return kOk;
}

struct EvalArgs {
    std::string model_path;
    std::string dataset_path;
    std::string spec_path;
    std::string out_path = "eval.json";
};

inline int cmd_eval(const EvalArgs& args) {
    for (const std::string& path : {args.model_path, args.dataset_path}) {
        if (!std::filesystem::exists(path)) {
            std::cerr << "error: file not found: " << path << "\n";
            return kUsage;
        }
    }
    const std::string spec_path =
        args.spec_path.empty() ? default_spec_path(args.dataset_path) : args.spec_path;
    if (!std::filesystem::exists(spec_path)) {
        std::cerr << "error: dataset spec not found: " << spec_path << "\n";
        return kUsage;
    }
    RunManifest manifest;
    manifest.subcommand = "eval";
    manifest.add_input(args.model_path);
    manifest.add_input(args.dataset_path);
    manifest.add_input(spec_path);
    manifest.outputs.push_back(args.out_path);

    ProblemBundle bundle = load_bundle(args.dataset_path, spec_path);
    PredictorModel model = checkpoint_from_json(Json::parse(read_text_file(args.model_path)));
    std::vector<size_t> all(bundle.instances.size());
    for (size_t i = 0; i < all.size(); ++i) all[i] = i;
    EvalMetrics metrics = evaluate(model, bundle, all);

    Json out;
    out["mean_regret"] = metrics.mean_regret;
    out["mean_mse"] = metrics.mean_mse;
    out["evaluated"] = metrics.evaluated;
    out["excluded"] = metrics.excluded;
    out["manifest"] = manifest.to_json();
    write_text_file(args.out_path, out.dump(2) + "\n");
    std::cout << "mean regret " << metrics.mean_regret << ", mean mse " << metrics.mean_mse
              << " over " << metrics.evaluated << " instances (" << metrics.excluded
              << " excluded)\n";
    return kOk;
}

struct BenchArgs {
    std::string config_path;
    std::string out_dir = "bench_out";
    std::optional<int> seeds;
    std::optional<std::uint64_t> master_seed;
    std::optional<int> workers;
};

inline BenchConfig bench_config_from_json(const Json& j) {
    BenchConfig cfg;
    if (j.contains("methods")) {
        cfg.methods.clear();
        for (const auto& m : j.at("methods")) cfg.methods.push_back(m.get<std::string>());
    }
    if (j.contains("cutoffs"))
        for (const auto& c : j.at("cutoffs")) cfg.cutoffs.push_back(c.get<double>());
    cfg.seeds = j.value("seeds", 1);
    cfg.master_seed = j.value("master_seed", 0ull);
    cfg.train_fraction = j.value("train_fraction", 0.70);
    cfg.val_fraction = j.value("val_fraction", 0.15);
    cfg.workers = j.value("workers", 1);
    cfg.base.epochs = j.value("epochs", 20);
    cfg.base.batch_size = j.value("batch", 8);
    cfg.base.learning_rate = j.value("lr", 1e-2);
    cfg.base.hidden_dim = j.value("hidden", 0);
    cfg.base.weight_decay = j.value("weight_decay", 0.0);
    cfg.base.solver.lambda_cutoff = j.value("lambda_cutoff", 0.1);
    cfg.base.grad.damping = j.value("damping", 0.0);
    return cfg;
}

/// Bench datasets come either from files ("dataset"/"spec" keys) or from an
/// inline "gen" section seeded by the master seed.
inline ProblemBundle bench_bundle_from_config(const Json& j, const BenchConfig& cfg) {
    if (j.contains("dataset")) {
        const std::string dataset = j.at("dataset").get<std::string>();
        const std::string spec = j.value("spec", default_spec_path(dataset));
        return load_bundle(dataset, spec);
    }
    if (!j.contains("gen")) throw StructuralError("bench config needs 'dataset' or 'gen'");
    const Json& g = j.at("gen");
    const std::string family = g.value("problem", "shortestpath");
    if (family == "shortestpath") {
        ShortestPathGenConfig gen;
        gen.seed = cfg.master_seed;
        gen.num_nodes = g.value("nodes", 8);
        gen.extra_edges = g.value("extra_edges", 10);
        gen.num_instances = g.value("instances", 80);
        gen.noise = g.value("noise", 0.1);
        return gen_shortestpath_dataset(gen);
    }
    if (family == "knapsack") {
        KnapsackGenConfig gen;
        gen.seed = cfg.master_seed;
        gen.num_items = g.value("items", 10);
        gen.num_instances = g.value("instances", 80);
        gen.noise = g.value("noise", 0.1);
        gen.nonlinearity = g.value("nonlinearity", 1.0);
        return gen_knapsack_dataset(gen);
    }
    if (family == "scheduling") {
        SchedulingGenConfig gen;
        gen.seed = cfg.master_seed;
        gen.num_tasks = g.value("tasks", 3);
        gen.num_machines = g.value("machines", 2);
        gen.num_timeslots = g.value("timeslots", 8);
        gen.num_instances = g.value("instances", 40);
        gen.noise = g.value("noise", 0.1);
        return gen_scheduling_dataset(gen);
    }
    throw StructuralError("unknown gen problem family: " + family);
}

inline int cmd_bench(const BenchArgs& args) {
    if (!std::filesystem::exists(args.config_path)) {
        std::cerr << "error: bench config not found: " << args.config_path << "\n";
        return kUsage;
    }
    const Json config_json = Json::parse(read_text_file(args.config_path));
    BenchConfig cfg = bench_config_from_json(config_json);
    if (args.seeds) cfg.seeds = *args.seeds;
    if (args.master_seed) cfg.master_seed = *args.master_seed;
    if (args.workers) cfg.workers = *args.workers;
    cfg.out_dir = args.out_dir;

    RunManifest manifest;
    manifest.subcommand = "bench";
    manifest.seed = cfg.master_seed;
    manifest.add_input(args.config_path);
    Json resolved = config_json;
    resolved["seeds"] = cfg.seeds;
    resolved["master_seed"] = cfg.master_seed;
    manifest.config = resolved;

    ProblemBundle bundle = bench_bundle_from_config(config_json, cfg);
    BenchOutputs outputs = run_bench(bundle, cfg);

    std::filesystem::create_directories(cfg.out_dir);
    const std::string report_path = cfg.out_dir + "/report.json";
    manifest.outputs.push_back(report_path);
    for (const auto& [name, csv] : outputs.curves) {
        const std::string path = cfg.out_dir + "/" + name;
        manifest.outputs.push_back(path);
        write_text_file(path, csv);
    }
    Json report = outputs.report.to_json();
    report["manifest"] = manifest.to_json();
    write_text_file(report_path, report.dump(2) + "\n");
    write_text_file(cfg.out_dir + "/manifest.json", manifest.to_json().dump(2) + "\n");

    for (const auto& row : outputs.report.rows)
        std::cout << row.label << ": regret " << row.regret_mean << " (" << row.regret_std
                  << "), mse " << row.mse_mean << " (" << row.mse_std << ") over " << row.seeds
                  << " seeds, " << row.failed_runs << " failed runs\n";
    for (const auto& err : outputs.errors) std::cerr << "run failed: " << err << "\n";
    return kOk;
}

}  // namespace intopt::cli
