#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "intopt/errors.hpp"
#include "intopt/hsd.hpp"
#include "intopt/predictor.hpp"
#include "intopt/problem.hpp"
#include "intopt/problems.hpp"

namespace intopt {

using Json = nlohmann::json;

inline Json to_json(const Vector& v) {
    Json arr = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

inline Json to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

inline Vector vector_from_json(const Json& j) {
    if (!j.is_array()) throw StructuralError("expected a JSON array for a vector");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    return v;
}

inline Matrix matrix_from_json(const Json& j) {
    if (!j.is_array()) throw StructuralError("expected a JSON array of rows for a matrix");
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    if (rows == 0) return Matrix(0, 0);
    const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const Json& row = j[static_cast<size_t>(i)];
        if (static_cast<Eigen::Index>(row.size()) != cols)
            throw StructuralError("ragged matrix rows in JSON");
        for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = row[static_cast<size_t>(k)].get<double>();
    }
    return m;
}

// Problem interchange format:
// {"sense", "c", "A_eq", "b_eq", "A_ub", "b_ub", "integrality"}, row-major.
inline Json problem_to_json(const GeneralProblem& p) {
    Json j;
    j["sense"] = (p.sense == Sense::kMax) ? "max" : "min";
    j["c"] = to_json(p.objective);
    j["A_eq"] = to_json(p.eq_lhs);
    j["b_eq"] = to_json(p.eq_rhs);
    j["A_ub"] = to_json(p.ub_lhs);
    j["b_ub"] = to_json(p.ub_rhs);
    Json flags = Json::array();
    for (bool f : p.integrality) flags.push_back(f ? 1 : 0);
    j["integrality"] = flags;
    return j;
}

inline GeneralProblem problem_from_json(const Json& j) {
    GeneralProblem p;
    const std::string sense = j.value("sense", "min");
    if (sense != "min" && sense != "max") throw StructuralError("sense must be 'min' or 'max'");
    p.sense = (sense == "max") ? Sense::kMax : Sense::kMin;
    if (!j.contains("c")) throw StructuralError("problem JSON missing field 'c'");
    p.objective = vector_from_json(j.at("c"));
    const Eigen::Index n = p.objective.size();
    p.eq_lhs = j.contains("A_eq") ? matrix_from_json(j.at("A_eq")) : Matrix(0, n);
    p.eq_rhs = j.contains("b_eq") ? vector_from_json(j.at("b_eq")) : Vector(0);
    p.ub_lhs = j.contains("A_ub") ? matrix_from_json(j.at("A_ub")) : Matrix(0, n);
    p.ub_rhs = j.contains("b_ub") ? vector_from_json(j.at("b_ub")) : Vector(0);
    if (p.eq_lhs.rows() > 0 && p.eq_lhs.cols() == 0) p.eq_lhs.resize(p.eq_lhs.rows(), n);
    if (j.contains("integrality")) {
        for (const auto& f : j.at("integrality")) p.integrality.push_back(f.get<int>() != 0);
    }
    p.validate();
    return p;
}

inline Json solution_to_json(const StandardFormLP& lp, const LPSolution& sol) {
    Json j;
    j["status"] = to_string(sol.status);
    j["x"] = to_json(Vector(lp.to_original(sol.x)));
    j["y"] = to_json(sol.y);
    j["t"] = to_json(sol.t);
    j["objective"] = lp.original_objective(sol.x);
    j["lambda_final"] = sol.lambda_final;
    j["iterations"] = sol.iterations;
    j["residuals"] = Json{{"primal", sol.primal_residual},
                          {"dual", sol.dual_residual},
                          {"gap", sol.x.dot(sol.t)}};
    return j;
}

// Dataset files: JSON lines, one instance per line {z, c, b_override?}, with
// a spec JSON alongside describing the shared problem and the oracle data.
inline Json bundle_spec_to_json(const ProblemBundle& bundle) {
    Json j;
    j["family"] = to_string(bundle.family);
    j["problem"] = problem_to_json(bundle.problem);
    if (bundle.cost_map.size() > 0) j["cost_map"] = to_json(bundle.cost_map);
    j["metadata"] = bundle.metadata;
    switch (bundle.family) {
        case ProblemFamily::kKnapsack:
            j["knapsack"] = Json{{"costs", to_json(bundle.knapsack.costs)},
                                 {"budget", bundle.knapsack.budget}};
            break;
        case ProblemFamily::kShortestPath: {
            Json edges = Json::array();
            for (auto [u, v] : bundle.graph.edges) edges.push_back(Json::array({u, v}));
            j["graph"] = Json{{"nodes", bundle.graph.num_nodes},
                              {"edges", edges},
                              {"source", bundle.graph.source},
                              {"dest", bundle.graph.dest}};
            break;
        }
        case ProblemFamily::kScheduling: {
            Json tasks = Json::array();
            for (const auto& t : bundle.scheduling.tasks)
                tasks.push_back(Json{{"duration", t.duration},
                                     {"earliest_start", t.earliest_start},
                                     {"latest_end", t.latest_end},
                                     {"power", t.power},
                                     {"resource_usage", to_json(t.resource_usage)}});
            j["scheduling"] = Json{{"tasks", tasks},
                                   {"machine_capacity", to_json(bundle.scheduling.machine_capacity)},
                                   {"num_timeslots", bundle.scheduling.num_timeslots}};
            break;
        }
    }
    return j;
}

inline ProblemBundle bundle_spec_from_json(const Json& j) {
    ProblemBundle bundle;
    const std::string family = j.at("family").get<std::string>();
    if (family == "knapsack") bundle.family = ProblemFamily::kKnapsack;
    else if (family == "shortestpath") bundle.family = ProblemFamily::kShortestPath;
    else if (family == "scheduling") bundle.family = ProblemFamily::kScheduling;
    else throw StructuralError("unknown problem family: " + family);
    bundle.problem = problem_from_json(j.at("problem"));
    if (j.contains("cost_map")) bundle.cost_map = matrix_from_json(j.at("cost_map"));
    bundle.metadata = j.value("metadata", "");
    if (j.contains("knapsack")) {
        bundle.knapsack.costs = vector_from_json(j.at("knapsack").at("costs"));
        bundle.knapsack.budget = j.at("knapsack").at("budget").get<double>();
    }
    if (j.contains("graph")) {
        const Json& g = j.at("graph");
        bundle.graph.num_nodes = g.at("nodes").get<Eigen::Index>();
        for (const auto& e : g.at("edges"))
            bundle.graph.edges.emplace_back(e[0].get<Eigen::Index>(), e[1].get<Eigen::Index>());
        bundle.graph.source = g.at("source").get<Eigen::Index>();
        bundle.graph.dest = g.at("dest").get<Eigen::Index>();
    }
    if (j.contains("scheduling")) {
        const Json& s = j.at("scheduling");
        for (const auto& tj : s.at("tasks")) {
            SchedulingTask t;
            t.duration = tj.at("duration").get<int>();
            t.earliest_start = tj.at("earliest_start").get<int>();
            t.latest_end = tj.at("latest_end").get<int>();
            t.power = tj.at("power").get<double>();
            t.resource_usage = vector_from_json(tj.at("resource_usage"));
            bundle.scheduling.tasks.push_back(std::move(t));
        }
        bundle.scheduling.machine_capacity = matrix_from_json(s.at("machine_capacity"));
        bundle.scheduling.num_timeslots = s.at("num_timeslots").get<int>();
    }
    return bundle;
}

inline std::string instance_to_jsonl(const DatasetInstance& inst) {
    Json j;
    j["z"] = to_json(inst.features);
    j["c"] = to_json(inst.costs);
    if (inst.rhs_override) j["b_override"] = to_json(*inst.rhs_override);
    return j.dump();
}

inline DatasetInstance instance_from_jsonl(const std::string& line) {
    const Json j = Json::parse(line);
    DatasetInstance inst;
    inst.features = vector_from_json(j.at("z"));
    inst.costs = vector_from_json(j.at("c"));
    if (j.contains("b_override")) inst.rhs_override = vector_from_json(j.at("b_override"));
    return inst;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw StructuralError("cannot write file: " + path);
    out << content;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StructuralError("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void save_bundle(const ProblemBundle& bundle, const std::string& dataset_path,
                        const std::string& spec_path) {
    std::ostringstream lines;
    for (const auto& inst : bundle.instances) lines << instance_to_jsonl(inst) << "\n";
    write_text_file(dataset_path, lines.str());
    write_text_file(spec_path, bundle_spec_to_json(bundle).dump(2) + "\n");
}

inline ProblemBundle load_bundle(const std::string& dataset_path, const std::string& spec_path) {
    ProblemBundle bundle = bundle_spec_from_json(Json::parse(read_text_file(spec_path)));
    std::istringstream lines(read_text_file(dataset_path));
    std::string line;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        bundle.instances.push_back(instance_from_jsonl(line));
    }
    return bundle;
}

// Model checkpoints: layer shapes, flat row-major weights, optimizer state.
inline Json checkpoint_to_json(const PredictorModel& model, const OptimizerState& opt) {
    Json layers = Json::array();
    for (const auto& layer : model.layers()) {
        Json flat = Json::array();
        for (Eigen::Index r = 0; r < layer.weight.rows(); ++r)
            for (Eigen::Index c = 0; c < layer.weight.cols(); ++c)
                flat.push_back(layer.weight(r, c));
        layers.push_back(Json{{"rows", layer.weight.rows()},
                              {"cols", layer.weight.cols()},
                              {"weight", flat},
                              {"bias", to_json(layer.bias)}});
    }
    Json j;
    j["layers"] = layers;
    j["optimizer"] = Json{{"kind", opt.kind == OptimizerKind::kSgd ? "sgd" : "adam"},
                          {"learning_rate", opt.learning_rate},
                          {"weight_decay", opt.weight_decay},
                          {"step_count", opt.step_count}};
    return j;
}

inline PredictorModel checkpoint_from_json(const Json& j) {
    PredictorModel model;
    Eigen::Index in_dim = 0, out_dim = 0, hidden = 0;
    const Json& layers = j.at("layers");
    if (layers.size() == 1) {
        in_dim = layers[0].at("cols").get<Eigen::Index>();
        out_dim = layers[0].at("rows").get<Eigen::Index>();
    } else {
        in_dim = layers[0].at("cols").get<Eigen::Index>();
        hidden = layers[0].at("rows").get<Eigen::Index>();
        out_dim = layers[1].at("rows").get<Eigen::Index>();
    }
    model = PredictorModel::zeros(in_dim, out_dim, hidden);
    for (size_t i = 0; i < layers.size(); ++i) {
        Layer& layer = model.layers()[i];
        const Json& flat = layers[i].at("weight");
        Eigen::Index pos = 0;
        for (Eigen::Index r = 0; r < layer.weight.rows(); ++r)
            for (Eigen::Index c = 0; c < layer.weight.cols(); ++c)
                layer.weight(r, c) = flat[static_cast<size_t>(pos++)].get<double>();
        layer.bias = vector_from_json(layers[i].at("bias"));
    }
    return model;
}

}  // namespace intopt
