#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "intopt/errors.hpp"
#include "intopt/problem.hpp"

namespace intopt {

// ---------------------------------------------------------------------------
// Knapsack
// ---------------------------------------------------------------------------

struct KnapsackSpec {
    Vector costs;   // per-item cost (weight), strictly positive
    double budget = 0.0;

    void validate() const {
        if (costs.size() == 0) throw StructuralError("knapsack needs at least one item");
        if (costs.minCoeff() <= 0.0) throw StructuralError("knapsack costs must be positive");
        if (budget <= 0.0) throw StructuralError("knapsack budget must be positive");
    }
};

/// max p.x  s.t.  costs.x <= budget, 0 <= x <= 1, x binary. The item values
/// are the prediction target and land in the objective.
inline GeneralProblem knapsack_to_lp(const KnapsackSpec& spec, const Vector& values) {
    spec.validate();
    const Eigen::Index n = spec.costs.size();
    if (values.size() != n) throw StructuralError("knapsack value count != item count");
    GeneralProblem p;
    p.sense = Sense::kMax;
    p.objective = values;
    p.ub_lhs = Matrix::Zero(n + 1, n);
    p.ub_rhs = Vector::Zero(n + 1);
    p.ub_lhs.row(0) = spec.costs.transpose();
    p.ub_rhs(0) = spec.budget;
    p.ub_lhs.bottomRows(n) = Matrix::Identity(n, n);
    p.ub_rhs.tail(n).setOnes();
    p.integrality.assign(static_cast<size_t>(n), true);
    return p;
}

struct KnapsackResult {
    std::vector<Eigen::Index> chosen;
    Vector x;
    double objective = 0.0;
};

/// Exact 0-1 knapsack by dynamic programming over the budget. Costs scale by
/// 1e6 and round to integers; the scaled grid is reduced by its gcd. Refuses
/// budgets whose scaled grid would blow up.
inline KnapsackResult knapsack_oracle(const Vector& values, const Vector& costs, double budget) {
    if (values.size() != costs.size()) throw StructuralError("knapsack oracle size mismatch");
    const Eigen::Index n = values.size();
    KnapsackResult result;
    result.x = Vector::Zero(n);
    if (budget < 0.0) throw StructuralError("knapsack budget must be nonnegative");

    const double scale = 1e6;
    std::vector<std::int64_t> w(static_cast<size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        w[static_cast<size_t>(i)] = static_cast<std::int64_t>(std::llround(costs(i) * scale));
        if (w[static_cast<size_t>(i)] <= 0)
            throw StructuralError("knapsack oracle needs positive costs");
    }
    std::int64_t cap = static_cast<std::int64_t>(std::floor(budget * scale + 0.5 + 1e-9));
    std::int64_t g = cap;
    for (auto wi : w) g = std::gcd(g, wi);
    if (g > 1) {
        for (auto& wi : w) wi /= g;
        cap /= g;
    }
    if (cap > 50'000'000) throw StructuralError("knapsack budget overflows the DP grid after scaling");
    if (cap < 0) cap = 0;

    std::vector<double> best(static_cast<size_t>(cap) + 1, 0.0);
    std::vector<std::vector<bool>> take(static_cast<size_t>(n),
                                        std::vector<bool>(static_cast<size_t>(cap) + 1, false));
    for (Eigen::Index i = 0; i < n; ++i) {
        const std::int64_t wi = w[static_cast<size_t>(i)];
        const double vi = values(i);
        for (std::int64_t capacity = cap; capacity >= wi; --capacity) {
            const double with = best[static_cast<size_t>(capacity - wi)] + vi;
            if (with > best[static_cast<size_t>(capacity)]) {
                best[static_cast<size_t>(capacity)] = with;
                take[static_cast<size_t>(i)][static_cast<size_t>(capacity)] = true;
            }
        }
    }
    std::int64_t cap_left = cap;
    for (Eigen::Index i = n - 1; i >= 0; --i) {
        if (take[static_cast<size_t>(i)][static_cast<size_t>(cap_left)]) {
            result.chosen.push_back(i);
            result.x(i) = 1.0;
            cap_left -= w[static_cast<size_t>(i)];
        }
    }
    std::reverse(result.chosen.begin(), result.chosen.end());
    result.objective = best[static_cast<size_t>(cap)];
    return result;
}

// ---------------------------------------------------------------------------
// Shortest path
// ---------------------------------------------------------------------------

struct ShortestPathSpec {
    Eigen::Index num_nodes = 0;
    std::vector<std::pair<Eigen::Index, Eigen::Index>> edges;  // directed (u, v)
    Eigen::Index source = 0;
    Eigen::Index dest = 0;

    void validate() const {
        if (num_nodes < 2) throw StructuralError("shortest path needs at least two nodes");
        if (source == dest) throw StructuralError("source equals destination");
        if (source < 0 || source >= num_nodes || dest < 0 || dest >= num_nodes)
            throw StructuralError("source or destination out of range");
        for (auto [u, v] : edges)
            if (u < 0 || u >= num_nodes || v < 0 || v >= num_nodes || u == v)
                throw StructuralError("edge endpoint out of range");
    }
};

/// Unit-flow vector for a (source, dest) pair over the incidence rows with
/// the final node's row dropped.
inline Vector flow_rhs(const ShortestPathSpec& spec, Eigen::Index source, Eigen::Index dest) {
    Vector b = Vector::Zero(spec.num_nodes - 1);
    if (source < spec.num_nodes - 1) b(source) = 1.0;
    if (dest < spec.num_nodes - 1) b(dest) = -1.0;
    return b;
}

/// min w.x over unit s->d flows: node-edge incidence equalities, x >= 0. The
/// incidence rows sum to zero, so the last node's row is dropped to keep the
/// matrix full row rank.
inline GeneralProblem shortestpath_to_lp(const ShortestPathSpec& spec, const Vector& weights) {
    spec.validate();
    const Eigen::Index m = static_cast<Eigen::Index>(spec.edges.size());
    if (weights.size() != m) throw StructuralError("weight count != edge count");
    GeneralProblem p;
    p.sense = Sense::kMin;
    p.objective = weights;
    p.eq_lhs = Matrix::Zero(spec.num_nodes - 1, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        auto [u, v] = spec.edges[static_cast<size_t>(j)];
        if (u < spec.num_nodes - 1) p.eq_lhs(u, j) = 1.0;
        if (v < spec.num_nodes - 1) p.eq_lhs(v, j) = -1.0;
    }
    p.eq_rhs = flow_rhs(spec, spec.source, spec.dest);
    p.integrality.assign(static_cast<size_t>(m), true);
    return p;
}

struct PathResult {
    std::vector<Eigen::Index> edges;  // edge indices along the path
    Vector x;                         // 0-1 indicator over edges
    double cost = 0.0;
};

/// Dijkstra with deterministic tie breaking: on equal distance the smaller
/// predecessor edge index wins. Weights must be nonnegative.
inline std::optional<PathResult> dijkstra_oracle(const ShortestPathSpec& spec,
                                                 const Vector& weights) {
    spec.validate();
    const Eigen::Index m = static_cast<Eigen::Index>(spec.edges.size());
    if (weights.size() != m) throw StructuralError("weight count != edge count");
    if (m > 0 && weights.minCoeff() < 0.0)
        throw StructuralError("dijkstra needs nonnegative weights");

    std::vector<std::vector<Eigen::Index>> out(static_cast<size_t>(spec.num_nodes));
    for (Eigen::Index j = 0; j < m; ++j)
        out[static_cast<size_t>(spec.edges[static_cast<size_t>(j)].first)].push_back(j);

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(static_cast<size_t>(spec.num_nodes), inf);
    std::vector<Eigen::Index> pred(static_cast<size_t>(spec.num_nodes), -1);
    dist[static_cast<size_t>(spec.source)] = 0.0;
    using Entry = std::pair<double, Eigen::Index>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    heap.emplace(0.0, spec.source);
    while (!heap.empty()) {
        auto [d, node] = heap.top();
        heap.pop();
        if (d > dist[static_cast<size_t>(node)]) continue;
        for (Eigen::Index j : out[static_cast<size_t>(node)]) {
            const Eigen::Index next = spec.edges[static_cast<size_t>(j)].second;
            const double nd = d + weights(j);
            if (nd < dist[static_cast<size_t>(next)] ||
                (nd == dist[static_cast<size_t>(next)] && pred[static_cast<size_t>(next)] >= 0 &&
                 j < pred[static_cast<size_t>(next)])) {
                dist[static_cast<size_t>(next)] = nd;
                pred[static_cast<size_t>(next)] = j;
                heap.emplace(nd, next);
            }
        }
    }
    if (dist[static_cast<size_t>(spec.dest)] == inf) return std::nullopt;

    PathResult result;
    result.x = Vector::Zero(m);
    for (Eigen::Index node = spec.dest; node != spec.source;) {
        const Eigen::Index j = pred[static_cast<size_t>(node)];
        result.edges.push_back(j);
        result.x(j) = 1.0;
        node = spec.edges[static_cast<size_t>(j)].first;
    }
    std::reverse(result.edges.begin(), result.edges.end());
    result.cost = dist[static_cast<size_t>(spec.dest)];
    return result;
}

/// Bellman-Ford; handles negative weights on graphs without negative cycles,
/// which makes it the evaluation oracle when predictions go negative.
inline std::optional<PathResult> bellman_ford_oracle(const ShortestPathSpec& spec,
                                                     const Vector& weights) {
    spec.validate();
    const Eigen::Index m = static_cast<Eigen::Index>(spec.edges.size());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(static_cast<size_t>(spec.num_nodes), inf);
    std::vector<Eigen::Index> pred(static_cast<size_t>(spec.num_nodes), -1);
    dist[static_cast<size_t>(spec.source)] = 0.0;
    for (Eigen::Index pass = 0; pass < spec.num_nodes; ++pass) {
        bool changed = false;
        for (Eigen::Index j = 0; j < m; ++j) {
            auto [u, v] = spec.edges[static_cast<size_t>(j)];
            if (dist[static_cast<size_t>(u)] == inf) continue;
            const double nd = dist[static_cast<size_t>(u)] + weights(j);
            if (nd < dist[static_cast<size_t>(v)] - 1e-15) {
                dist[static_cast<size_t>(v)] = nd;
                pred[static_cast<size_t>(v)] = j;
                changed = true;
                if (pass == spec.num_nodes - 1)
                    throw NumericalError("negative cycle in shortest-path instance");
            }
        }
        if (!changed) break;
    }
    if (dist[static_cast<size_t>(spec.dest)] == inf) return std::nullopt;
    PathResult result;
    result.x = Vector::Zero(m);
    for (Eigen::Index node = spec.dest; node != spec.source;) {
        const Eigen::Index j = pred[static_cast<size_t>(node)];
        if (j < 0) return std::nullopt;
        result.edges.push_back(j);
        result.x(j) = 1.0;
        node = spec.edges[static_cast<size_t>(j)].first;
    }
    std::reverse(result.edges.begin(), result.edges.end());
    result.cost = dist[static_cast<size_t>(spec.dest)];
    return result;
}

// ---------------------------------------------------------------------------
// Energy-cost scheduling
// ---------------------------------------------------------------------------

struct SchedulingTask {
    int duration = 1;
    int earliest_start = 0;
    int latest_end = 0;     // exclusive: the task must finish by this slot
    double power = 1.0;
    Vector resource_usage;  // length = resource count
};

struct SchedulingSpec {
    std::vector<SchedulingTask> tasks;
    Matrix machine_capacity;  // machines x resources
    int num_timeslots = 0;

    void validate() const {
        if (tasks.empty()) throw StructuralError("scheduling needs at least one task");
        if (machine_capacity.rows() == 0) throw StructuralError("scheduling needs a machine");
        if (num_timeslots <= 0) throw StructuralError("scheduling needs timeslots");
        for (const auto& task : tasks) {
            if (task.duration <= 0) throw StructuralError("task duration must be positive");
            if (task.earliest_start + task.duration > task.latest_end)
                throw StructuralError("task window shorter than its duration");
            if (task.latest_end > num_timeslots)
                throw StructuralError("task window exceeds the horizon");
            if (task.resource_usage.size() != machine_capacity.cols())
                throw StructuralError("task resource vector length mismatch");
        }
    }
};

/// One variable per feasible (task, machine, start) triple in lexicographic
/// order; infeasible starts are eliminated rather than pinned to zero.
struct SchedulingLP {
    GeneralProblem problem;
    Matrix price_map;  // |T| x nvars: LP costs = price_map^T . slot prices
    std::vector<std::array<Eigen::Index, 3>> var_index;  // (task, machine, start)
};

inline SchedulingLP scheduling_to_lp(const SchedulingSpec& spec) {
    spec.validate();
    const Eigen::Index num_tasks = static_cast<Eigen::Index>(spec.tasks.size());
    const Eigen::Index num_machines = spec.machine_capacity.rows();
    const Eigen::Index num_resources = spec.machine_capacity.cols();
    const Eigen::Index horizon = spec.num_timeslots;

    SchedulingLP out;
    for (Eigen::Index j = 0; j < num_tasks; ++j) {
        const auto& task = spec.tasks[static_cast<size_t>(j)];
        bool any = false;
        for (Eigen::Index machine = 0; machine < num_machines; ++machine) {
            // a capacity-zero machine cannot host a task with positive usage
            bool fits = true;
            for (Eigen::Index r = 0; r < num_resources; ++r)
                if (task.resource_usage(r) > spec.machine_capacity(machine, r)) fits = false;
            if (!fits) continue;
            for (int start = task.earliest_start; start + task.duration <= task.latest_end; ++start) {
                out.var_index.push_back({j, machine, static_cast<Eigen::Index>(start)});
                any = true;
            }
        }
        if (!any) throw InfeasibleError("task " + std::to_string(j) + " has no feasible start");
    }

    const Eigen::Index nvars = static_cast<Eigen::Index>(out.var_index.size());
    GeneralProblem& p = out.problem;
    p.sense = Sense::kMin;
    p.objective = Vector::Zero(nvars);  // filled from prices via price_map
    p.eq_lhs = Matrix::Zero(num_tasks, nvars);
    p.eq_rhs = Vector::Ones(num_tasks);
    out.price_map = Matrix::Zero(horizon, nvars);
    for (Eigen::Index v = 0; v < nvars; ++v) {
        const auto [task_id, machine, start] = out.var_index[static_cast<size_t>(v)];
        p.eq_lhs(task_id, v) = 1.0;
        const auto& task = spec.tasks[static_cast<size_t>(task_id)];
        for (int t = static_cast<int>(start); t < static_cast<int>(start) + task.duration; ++t)
            out.price_map(t, v) = task.power;
    }

    // resource rows: sum over tasks running at slot t on machine m.
    std::vector<Eigen::Index> rows;
    Matrix ub = Matrix::Zero(num_machines * num_resources * horizon, nvars);
    Vector ub_rhs = Vector::Zero(num_machines * num_resources * horizon);
    Eigen::Index row = 0;
    for (Eigen::Index machine = 0; machine < num_machines; ++machine)
        for (Eigen::Index r = 0; r < num_resources; ++r)
            for (Eigen::Index t = 0; t < horizon; ++t) {
                bool nonzero = false;
                for (Eigen::Index v = 0; v < nvars; ++v) {
                    const auto [task_id, vm, start] = out.var_index[static_cast<size_t>(v)];
                    if (vm != machine) continue;
                    const auto& task = spec.tasks[static_cast<size_t>(task_id)];
                    if (start <= t && t < start + task.duration && task.resource_usage(r) != 0.0) {
                        ub(row, v) = task.resource_usage(r);
                        nonzero = true;
                    }
                }
                if (nonzero) {
                    ub_rhs(row) = spec.machine_capacity(machine, r);
                    rows.push_back(row);
                }
                ++row;
            }
    p.ub_lhs = Matrix::Zero(static_cast<Eigen::Index>(rows.size()), nvars);
    p.ub_rhs = Vector::Zero(static_cast<Eigen::Index>(rows.size()));
    for (size_t i = 0; i < rows.size(); ++i) {
        p.ub_lhs.row(static_cast<Eigen::Index>(i)) = ub.row(rows[i]);
        p.ub_rhs(static_cast<Eigen::Index>(i)) = ub_rhs(rows[i]);
    }
    p.integrality.assign(static_cast<size_t>(nvars), true);
    return out;
}

// ---------------------------------------------------------------------------
// Exhaustive 0-1 oracle
// ---------------------------------------------------------------------------

struct MilpResult {
    Vector x;
    double objective = 0.0;
};

/// Exhaustive search over 0-1 assignments, exact for up to 22 binaries. Ties
/// resolve to the lexicographically first assignment (x_0 most significant).
inline std::optional<MilpResult> brute_force_milp(const GeneralProblem& p,
                                                  double feas_tol = 1e-6) {
    p.validate();
    const Eigen::Index n = p.num_vars();
    if (n > 22) throw StructuralError("brute-force oracle refuses more than 22 binaries");
    for (Eigen::Index i = 0; i < n; ++i)
        if (p.integrality.empty() || !p.integrality[static_cast<size_t>(i)])
            throw StructuralError("brute-force oracle needs all-binary problems");

    const double sign = (p.sense == Sense::kMax) ? -1.0 : 1.0;
    std::optional<MilpResult> best;
    Vector x(n);
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t code = 0; code < total; ++code) {
        for (Eigen::Index i = 0; i < n; ++i)
            x(i) = ((code >> (n - 1 - i)) & 1u) ? 1.0 : 0.0;
        if (p.eq_lhs.rows() > 0 &&
            ((p.eq_lhs * x - p.eq_rhs).cwiseAbs().maxCoeff() > feas_tol))
            continue;
        if (p.ub_lhs.rows() > 0 && ((p.ub_lhs * x - p.ub_rhs).maxCoeff() > feas_tol))
            continue;
        const double obj = sign * p.objective.dot(x);
        if (!best || obj < sign * best->objective - 1e-15) {
            best = MilpResult{x, p.objective.dot(x)};
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Synthetic dataset generators
// ---------------------------------------------------------------------------

struct DatasetInstance {
    Vector features;
    Vector costs;                     // prediction target
    std::optional<Vector> rhs_override;  // replaces the shared eq_rhs
};

enum class ProblemFamily { kKnapsack, kShortestPath, kScheduling };

inline const char* to_string(ProblemFamily f) {
    switch (f) {
        case ProblemFamily::kKnapsack: return "knapsack";
        case ProblemFamily::kShortestPath: return "shortestpath";
        case ProblemFamily::kScheduling: return "scheduling";
    }
    return "unknown";
}

/// Shared problem structure plus the per-instance data, everything the
/// training loop and the exact evaluation oracles need.
struct ProblemBundle {
    ProblemFamily family = ProblemFamily::kShortestPath;
    GeneralProblem problem;   // objective holds placeholder costs
    Matrix cost_map;          // nvars x target-length; empty means identity
    std::vector<DatasetInstance> instances;
    // family data for the exact oracles
    KnapsackSpec knapsack;
    ShortestPathSpec graph;
    SchedulingSpec scheduling;
    std::string metadata;  // generator notes (seed, noise, distribution)

    Vector lp_costs(const Vector& target) const {
        if (cost_map.size() == 0) return target;
        return cost_map.transpose() * target;
    }
};

struct ShortestPathGenConfig {
    Eigen::Index num_nodes = 8;
    Eigen::Index extra_edges = 10;  // beyond the chain backbone
    Eigen::Index num_instances = 80;
    Eigen::Index feature_dim = 2;   // per node
    double noise = 0.1;
    std::uint64_t seed = 0;
};

namespace detail {

inline Vector relu(const Vector& v) { return v.cwiseMax(0.0); }

/// Fixed random 3-layer ReLU network used as the ground-truth edge-weight
/// generator; one network shared by all edges and instances.
struct WeightNet {
    Matrix w1, w2, w3;
    Vector b1, b2, b3;

    static WeightNet create(Eigen::Index in_dim, std::mt19937_64& rng) {
        std::normal_distribution<double> dist(0.0, 1.0);
        auto fill = [&](Matrix& m, Eigen::Index r, Eigen::Index c) {
            m.resize(r, c);
            for (Eigen::Index i = 0; i < r; ++i)
                for (Eigen::Index j = 0; j < c; ++j) m(i, j) = dist(rng);
        };
        auto fillv = [&](Vector& v, Eigen::Index r) {
            v.resize(r);
            for (Eigen::Index i = 0; i < r; ++i) v(i) = dist(rng);
        };
        WeightNet net;
        fill(net.w1, 8, in_dim);
        fillv(net.b1, 8);
        fill(net.w2, 8, 8);
        fillv(net.b2, 8);
        fill(net.w3, 1, 8);
        fillv(net.b3, 1);
        return net;
    }

    double operator()(const Vector& z) const {
        return (w3 * relu(w2 * relu(w1 * z + b1) + b2) + b3)(0);
    }
};

}  // namespace detail

/// Grid-free layered DAG: a chain backbone guarantees s -> d connectivity for
/// every s < d, plus random extra forward edges. Edge weight = fixed 3-layer
/// ReLU net of [features(u), features(v), uniform draw] + Gaussian noise,
/// clamped positive. Each instance gets its own (s, d) pair as an rhs
/// override.
inline ProblemBundle gen_shortestpath_dataset(const ShortestPathGenConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    ProblemBundle bundle;
    bundle.family = ProblemFamily::kShortestPath;

    ShortestPathSpec& spec = bundle.graph;
    spec.num_nodes = cfg.num_nodes;
    for (Eigen::Index i = 0; i + 1 < cfg.num_nodes; ++i) spec.edges.emplace_back(i, i + 1);
    std::uniform_int_distribution<Eigen::Index> node_dist(0, cfg.num_nodes - 1);
    Eigen::Index added = 0;
    for (int tries = 0; added < cfg.extra_edges && tries < 4000; ++tries) {
        Eigen::Index u = node_dist(rng);
        Eigen::Index v = node_dist(rng);
        if (u > v) std::swap(u, v);
        if (u == v || (v == u + 1)) continue;
        if (std::find(spec.edges.begin(), spec.edges.end(), std::make_pair(u, v)) !=
            spec.edges.end())
            continue;
        spec.edges.emplace_back(u, v);
        ++added;
    }
    std::sort(spec.edges.begin(), spec.edges.end());
    spec.source = 0;
    spec.dest = cfg.num_nodes - 1;

    const Eigen::Index num_edges = static_cast<Eigen::Index>(spec.edges.size());
    Matrix node_features(cfg.num_nodes, cfg.feature_dim);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (Eigen::Index i = 0; i < cfg.num_nodes; ++i)
        for (Eigen::Index j = 0; j < cfg.feature_dim; ++j) node_features(i, j) = unif(rng);

    const Eigen::Index per_edge = 2 * cfg.feature_dim + 1;
    auto net = detail::WeightNet::create(per_edge, rng);
    std::normal_distribution<double> gauss(0.0, 1.0);

    for (Eigen::Index inst = 0; inst < cfg.num_instances; ++inst) {
        DatasetInstance item;
        item.features.resize(num_edges * per_edge);
        item.costs.resize(num_edges);
        for (Eigen::Index e = 0; e < num_edges; ++e) {
            auto [u, v] = spec.edges[static_cast<size_t>(e)];
            Vector z(per_edge);
            z.head(cfg.feature_dim) = node_features.row(u).transpose();
            z.segment(cfg.feature_dim, cfg.feature_dim) = node_features.row(v).transpose();
            z(per_edge - 1) = unif(rng);
            item.features.segment(e * per_edge, per_edge) = z;
            const double w = net(z) + cfg.noise * gauss(rng);
            item.costs(e) = std::max(w, 0.05);
        }
        std::uniform_int_distribution<Eigen::Index> src_dist(0, cfg.num_nodes - 2);
        const Eigen::Index s = src_dist(rng);
        std::uniform_int_distribution<Eigen::Index> dst_dist(s + 1, cfg.num_nodes - 1);
        const Eigen::Index d = dst_dist(rng);
        item.rhs_override = flow_rhs(spec, s, d);
        bundle.instances.push_back(std::move(item));
    }

    bundle.problem = shortestpath_to_lp(spec, Vector::Ones(num_edges));
    bundle.metadata = "shortestpath seed=" + std::to_string(cfg.seed) +
                      " nodes=" + std::to_string(cfg.num_nodes) +
                      " edges=" + std::to_string(num_edges) +
                      " noise=" + std::to_string(cfg.noise) +
                      " edge-random-input=uniform[0,1)";
    return bundle;
}

struct KnapsackGenConfig {
    Eigen::Index num_items = 10;
    Eigen::Index num_instances = 80;
    Eigen::Index feature_dim = 3;  // per item
    double budget_fraction = 0.5;  // of the total cost
    double nonlinearity = 1.0;     // weight of the quadratic term
    double noise = 0.1;
    std::uint64_t seed = 0;
};

/// Item values are a degree-2 polynomial of the item features plus Gaussian
/// noise; costs are small integers and the budget a fixed fraction of their
/// sum, so the exact DP oracle stays cheap.
inline ProblemBundle gen_knapsack_dataset(const KnapsackGenConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    ProblemBundle bundle;
    bundle.family = ProblemFamily::kKnapsack;

    std::uniform_int_distribution<int> cost_dist(1, 5);
    bundle.knapsack.costs.resize(cfg.num_items);
    for (Eigen::Index i = 0; i < cfg.num_items; ++i)
        bundle.knapsack.costs(i) = static_cast<double>(cost_dist(rng));
    bundle.knapsack.budget =
        std::max(1.0, std::floor(cfg.budget_fraction * bundle.knapsack.costs.sum()));

    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector lin(cfg.feature_dim);
    Matrix quad(cfg.feature_dim, cfg.feature_dim);
    for (Eigen::Index i = 0; i < cfg.feature_dim; ++i) lin(i) = 1.0 + unif(rng);
    for (Eigen::Index i = 0; i < cfg.feature_dim; ++i)
        for (Eigen::Index j = 0; j < cfg.feature_dim; ++j) quad(i, j) = unif(rng);

    for (Eigen::Index inst = 0; inst < cfg.num_instances; ++inst) {
        DatasetInstance item;
        item.features.resize(cfg.num_items * cfg.feature_dim);
        item.costs.resize(cfg.num_items);
        for (Eigen::Index i = 0; i < cfg.num_items; ++i) {
            Vector f(cfg.feature_dim);
            for (Eigen::Index j = 0; j < cfg.feature_dim; ++j) f(j) = unif(rng);
            item.features.segment(i * cfg.feature_dim, cfg.feature_dim) = f;
            double value = lin.dot(f) + cfg.nonlinearity * f.dot(quad * f) +
                           cfg.noise * gauss(rng);
            item.costs(i) = std::max(value, 0.01);
        }
        bundle.instances.push_back(std::move(item));
    }

    bundle.problem = knapsack_to_lp(bundle.knapsack, Vector::Ones(cfg.num_items));
    bundle.metadata = "knapsack seed=" + std::to_string(cfg.seed) +
                      " items=" + std::to_string(cfg.num_items) +
                      " budget=" + std::to_string(bundle.knapsack.budget) +
                      " nonlinearity=" + std::to_string(cfg.nonlinearity) +
                      " noise=" + std::to_string(cfg.noise);
    return bundle;
}

struct SchedulingGenConfig {
    Eigen::Index num_tasks = 3;
    Eigen::Index num_machines = 2;
    int num_timeslots = 8;
    Eigen::Index num_instances = 40;
    Eigen::Index feature_dim = 2;  // per timeslot
    double noise = 0.1;
    std::uint64_t seed = 0;
};

/// Slot prices are a degree-2 polynomial of per-slot features plus noise.
inline ProblemBundle gen_scheduling_dataset(const SchedulingGenConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    ProblemBundle bundle;
    bundle.family = ProblemFamily::kScheduling;

    SchedulingSpec& spec = bundle.scheduling;
    spec.num_timeslots = cfg.num_timeslots;
    spec.machine_capacity = Matrix::Ones(cfg.num_machines, 1);
    std::uniform_int_distribution<int> dur_dist(1, 3);
    for (Eigen::Index j = 0; j < cfg.num_tasks; ++j) {
        SchedulingTask task;
        task.duration = std::min(dur_dist(rng), cfg.num_timeslots);
        std::uniform_int_distribution<int> start_dist(0, cfg.num_timeslots - task.duration);
        task.earliest_start = start_dist(rng);
        std::uniform_int_distribution<int> end_dist(task.earliest_start + task.duration,
                                                    cfg.num_timeslots);
        task.latest_end = end_dist(rng);
        task.power = 0.5 + std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        task.resource_usage = Vector::Ones(1);
        spec.tasks.push_back(task);
    }

    SchedulingLP lp = scheduling_to_lp(spec);
    bundle.problem = lp.problem;
    bundle.cost_map = lp.price_map;

    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector lin(cfg.feature_dim);
    Matrix quad(cfg.feature_dim, cfg.feature_dim);
    for (Eigen::Index i = 0; i < cfg.feature_dim; ++i) lin(i) = 1.0 + unif(rng);
    for (Eigen::Index i = 0; i < cfg.feature_dim; ++i)
        for (Eigen::Index j = 0; j < cfg.feature_dim; ++j) quad(i, j) = unif(rng);

    for (Eigen::Index inst = 0; inst < cfg.num_instances; ++inst) {
        DatasetInstance item;
        item.features.resize(cfg.num_timeslots * cfg.feature_dim);
        item.costs.resize(cfg.num_timeslots);
        for (int t = 0; t < cfg.num_timeslots; ++t) {
            Vector f(cfg.feature_dim);
            for (Eigen::Index j = 0; j < cfg.feature_dim; ++j) f(j) = unif(rng);
            item.features.segment(t * cfg.feature_dim, cfg.feature_dim) = f;
            item.costs(t) = std::max(lin.dot(f) + f.dot(quad * f) + cfg.noise * gauss(rng), 0.01);
        }
        bundle.instances.push_back(std::move(item));
    }
    bundle.metadata = "scheduling seed=" + std::to_string(cfg.seed) +
                      " tasks=" + std::to_string(cfg.num_tasks) +
                      " slots=" + std::to_string(cfg.num_timeslots) +
                      " noise=" + std::to_string(cfg.noise);
    return bundle;
}

}  // namespace intopt
