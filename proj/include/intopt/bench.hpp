#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <future>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "intopt/json_io.hpp"
#include "intopt/train.hpp"

namespace intopt {

struct BenchCell {
    std::string label;
    TrainMethod method = TrainMethod::kTwoStage;
    std::optional<double> lambda_cutoff;  // overrides the base solver cutoff
};

struct BenchConfig {
    std::vector<std::string> methods{"two-stage", "intopt"};
    std::vector<double> cutoffs;  // optional sweep applied to LP-layer methods
    int seeds = 1;
    std::uint64_t master_seed = 0;
    double train_fraction = 0.70;
    double val_fraction = 0.15;  // remainder is the test split
    TrainConfig base;
    std::map<std::string, double> method_lr;  // per-method learning rates
    std::string out_dir = "bench_out";
    int workers = 1;
};

struct BenchRunOutcome {
    bool ok = false;
    double mse = 0.0;
    double regret = 0.0;
    int failures = 0;  // solver failures summed over epochs
    ExperimentRecord record;
    int best_epoch = -1;
    std::string error;
};

struct BenchRow {
    std::string label;
    int seeds = 0;           // successful runs
    int failed_runs = 0;
    double mse_mean = 0.0;
    double mse_std = 0.0;
    double regret_mean = 0.0;
    double regret_std = 0.0;
};

struct BenchRunSummary {
    std::string label;
    int seed_index = 0;
    bool ok = false;
    double mse = 0.0;
    double regret = 0.0;
    int solver_failures = 0;
    int best_epoch = -1;
};

struct BenchReport {
    std::vector<BenchRow> rows;
    std::vector<BenchRunSummary> runs;

    // column order is part of the schema:
    // method, seed count, mse_mean, mse_std, regret_mean, regret_std
    Json to_json() const {
        Json j;
        j["columns"] = Json::array(
            {"method", "seeds", "mse_mean", "mse_std", "regret_mean", "regret_std"});
        Json rws = Json::array();
        for (const auto& r : rows) {
            Json row = Json::array();
            row.push_back(r.label);
            row.push_back(r.seeds);
            row.push_back(r.seeds > 0 ? Json(r.mse_mean) : Json(nullptr));
            row.push_back(r.seeds > 1 ? Json(r.mse_std) : Json(nullptr));
            row.push_back(r.seeds > 0 ? Json(r.regret_mean) : Json(nullptr));
            row.push_back(r.seeds > 1 ? Json(r.regret_std) : Json(nullptr));
            rws.push_back(row);
        }
        j["rows"] = rws;
        Json failed = Json::object();
        for (const auto& r : rows)
            if (r.failed_runs > 0) failed[r.label] = r.failed_runs;
        j["failed_runs"] = failed;
        Json runs_json = Json::array();
        for (const auto& r : runs)
            runs_json.push_back(Json{{"method", r.label},
                                     {"seed_index", r.seed_index},
                                     {"ok", r.ok},
                                     {"mse", r.ok ? Json(r.mse) : Json(nullptr)},
                                     {"regret", r.ok ? Json(r.regret) : Json(nullptr)},
                                     {"solver_failures", r.solver_failures},
                                     {"best_epoch", r.best_epoch}});
        j["runs"] = runs_json;
        return j;
    }
};

namespace detail {

inline TrainMethod method_from_string(const std::string& name) {
    if (name == "two-stage") return TrainMethod::kTwoStage;
    if (name == "intopt") return TrainMethod::kIntopt;
    if (name == "spo") return TrainMethod::kSpo;
    throw StructuralError("unknown training method: " + name);
}

inline std::string format_double(double v) {
    std::ostringstream ss;
    ss.precision(17);
    ss << v;
    return ss.str();
}

inline std::string curve_csv(const ExperimentRecord& record) {
    std::ostringstream out;
    out << "epoch,train_mse,val_mse,val_regret,failures,seconds\n";
    for (const auto& row : record.epochs)
        out << row.epoch << ',' << format_double(row.train_mse) << ','
            << format_double(row.val_mse) << ',' << format_double(row.val_regret) << ','
            << row.failures << ',' << format_double(row.seconds) << "\n";
    return out.str();
}

inline BenchRunOutcome run_one(const ProblemBundle& bundle, const BenchCell& cell,
                               const BenchConfig& cfg, std::uint64_t run_seed) {
    BenchRunOutcome out;
    try {
        const size_t n = bundle.instances.size();
        const size_t n_train = static_cast<size_t>(cfg.train_fraction * static_cast<double>(n));
        const size_t n_val = static_cast<size_t>(cfg.val_fraction * static_cast<double>(n));
        if (n_train == 0 || n_val == 0 || n_train + n_val >= n)
            throw StructuralError("bench split fractions leave an empty split");
        std::vector<size_t> train_idx, val_idx, test_idx;
        for (size_t i = 0; i < n; ++i) {
            if (i < n_train) train_idx.push_back(i);
            else if (i < n_train + n_val) val_idx.push_back(i);
            else test_idx.push_back(i);
        }
        TrainConfig tc = cfg.base;
        tc.method = cell.method;
        tc.seed = run_seed;
        if (cell.lambda_cutoff) tc.solver.lambda_cutoff = *cell.lambda_cutoff;
        if (auto it = cfg.method_lr.find(to_string(cell.method)); it != cfg.method_lr.end())
            tc.learning_rate = it->second;
        TrainResult tr = train(bundle, train_idx, val_idx, tc);
        EvalMetrics test = evaluate(tr.model, bundle, test_idx);
        out.ok = true;
        out.mse = test.mean_mse;
        out.regret = test.mean_regret;
        out.record = tr.record;
        out.best_epoch = tr.best_epoch;
        for (const auto& row : tr.record.epochs) out.failures += row.failures;
    } catch (const Error& e) {
        out.ok = false;
        out.error = e.what();
    }
    return out;
}

}  // namespace detail

/// Expand the configured methods into bench cells; the cutoff sweep applies
/// to the methods that run the LP layer during training.
inline std::vector<BenchCell> bench_cells(const BenchConfig& cfg) {
    std::vector<BenchCell> cells;
    for (const auto& name : cfg.methods) {
        const TrainMethod method = detail::method_from_string(name);
        const bool uses_layer = method != TrainMethod::kTwoStage;
        if (uses_layer && !cfg.cutoffs.empty()) {
            for (double cutoff : cfg.cutoffs) {
                std::ostringstream label;
                label << name << "@cutoff=" << cutoff;
                cells.push_back({label.str(), method, cutoff});
            }
        } else {
            cells.push_back({name, method, std::nullopt});
        }
    }
    return cells;
}

struct BenchOutputs {
    BenchReport report;
    std::vector<std::pair<std::string, std::string>> curves;  // (filename, csv)
    std::vector<std::string> errors;
};

/// Run every (cell, seed) pair; per-run seeds derive from the master seed by
/// counter. Single-run failures mark the cell and the bench continues. Cells
/// run concurrently up to the worker limit; outputs are assembled in a fixed
/// order so the report is deterministic.
inline BenchOutputs run_bench(const ProblemBundle& bundle, const BenchConfig& cfg) {
    const std::vector<BenchCell> cells = bench_cells(cfg);
    BenchOutputs out;

    struct Task {
        size_t cell_index;
        int seed_index;
        std::uint64_t run_seed;
    };
    std::vector<Task> tasks;
    std::uint64_t counter = 0;
    for (size_t ci = 0; ci < cells.size(); ++ci)
        for (int s = 0; s < cfg.seeds; ++s)
            tasks.push_back({ci, s, cfg.master_seed + 1 + counter++});

    std::vector<BenchRunOutcome> outcomes(tasks.size());
    const size_t workers = static_cast<size_t>(std::max(1, cfg.workers));
    for (size_t begin = 0; begin < tasks.size(); begin += workers) {
        const size_t end = std::min(tasks.size(), begin + workers);
        std::vector<std::future<BenchRunOutcome>> futures;
        for (size_t i = begin; i < end; ++i)
            futures.push_back(std::async(std::launch::async, [&, i] {
                return detail::run_one(bundle, cells[tasks[i].cell_index], cfg, tasks[i].run_seed);
            }));
        for (size_t i = begin; i < end; ++i) outcomes[i] = futures[i - begin].get();
    }

    for (size_t ci = 0; ci < cells.size(); ++ci) {
        BenchRow row;
        row.label = cells[ci].label;
        std::vector<double> mses, regrets;
        for (size_t ti = 0; ti < tasks.size(); ++ti) {
            if (tasks[ti].cell_index != ci) continue;
            const BenchRunOutcome& oc = outcomes[ti];
            BenchRunSummary summary;
            summary.label = row.label;
            summary.seed_index = tasks[ti].seed_index;
            summary.ok = oc.ok;
            summary.mse = oc.mse;
            summary.regret = oc.regret;
            summary.solver_failures = oc.failures;
            summary.best_epoch = oc.best_epoch;
            out.report.runs.push_back(summary);
            if (!oc.ok) {
                row.failed_runs += 1;
                out.errors.push_back(row.label + " seed " + std::to_string(tasks[ti].seed_index) +
                                     ": " + oc.error);
                continue;
            }
            mses.push_back(oc.mse);
            regrets.push_back(oc.regret);
            std::ostringstream name;
            name << "curve_" << row.label << "_seed" << tasks[ti].seed_index << ".csv";
            out.curves.emplace_back(name.str(), detail::curve_csv(oc.record));
        }
        row.seeds = static_cast<int>(mses.size());
        auto mean = [](const std::vector<double>& v) {
            double s = 0.0;
            for (double x : v) s += x;
            return v.empty() ? 0.0 : s / static_cast<double>(v.size());
        };
        auto stdev = [&](const std::vector<double>& v, double mu) {
            if (v.size() < 2) return 0.0;
            double s = 0.0;
            for (double x : v) s += (x - mu) * (x - mu);
            return std::sqrt(s / static_cast<double>(v.size() - 1));
        };
        row.mse_mean = mean(mses);
        row.mse_std = stdev(mses, row.mse_mean);
        row.regret_mean = mean(regrets);
        row.regret_std = stdev(regrets, row.regret_mean);
        out.report.rows.push_back(row);
    }
    return out;
}

}  // namespace intopt
