#include "costru/mst.hpp"

#include <algorithm>
#include <numeric>

namespace costru {

UnionFind::UnionFind(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t UnionFind::find(std::size_t x) {
    while (parent_[x] != x) {
        parent_[x] = parent_[parent_[x]];
        x = parent_[x];
    }
    return x;
}

bool UnionFind::unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
}

GridGraph make_grid(std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) throw InputError("grid dimensions must be positive");
    GridGraph g;
    g.rows = rows;
    g.cols = cols;
    g.nb_nodes = rows * cols;
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c + 1 < cols; ++c) g.edges.emplace_back(r * cols + c, r * cols + c + 1);
    for (std::size_t r = 0; r + 1 < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) g.edges.emplace_back(r * cols + c, (r + 1) * cols + c);
    return g;
}

namespace {

void check_edge_vector(const Graph& graph, const Vector& v, const char* what) {
    if (v.size() != graph.nb_edges()) throw InputError(std::string(what) + ": length differs from edge count");
}

// Edge indices sorted by weight; stable so ties keep index order.
std::vector<std::size_t> order_by(const Vector& weights, bool descending) {
    std::vector<std::size_t> order(weights.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (descending)
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return weights[a] > weights[b]; });
    else
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return weights[a] < weights[b]; });
    return order;
}

}  // namespace

SolutionVector kruskal_max_weight_forest(const Graph& graph, const Vector& weights) {
    check_edge_vector(graph, weights, "kruskal");
    SolutionVector y(graph.nb_edges(), 0.0);
    UnionFind uf(graph.nb_nodes);
    for (std::size_t e : order_by(weights, true)) {
        if (weights[e] <= 0.0) break;
        if (uf.unite(graph.edges[e].first, graph.edges[e].second)) y[e] = 1.0;
    }
    return y;
}

SolutionVector kruskal_min_spanning_tree(const Graph& graph, const Vector& weights) {
    check_edge_vector(graph, weights, "spanning tree");
    SolutionVector t(graph.nb_edges(), 0.0);
    UnionFind uf(graph.nb_nodes);
    std::size_t added = 0;
    for (std::size_t e : order_by(weights, false))
        if (uf.unite(graph.edges[e].first, graph.edges[e].second)) {
            t[e] = 1.0;
            ++added;
        }
    if (graph.nb_nodes > 0 && added + 1 != graph.nb_nodes) throw InfeasibleError("graph is disconnected");
    return t;
}

bool is_forest(const Graph& graph, const SolutionVector& y) {
    check_edge_vector(graph, y, "forest check");
    UnionFind uf(graph.nb_nodes);
    for (std::size_t e = 0; e < y.size(); ++e) {
        if (y[e] != 0.0 && y[e] != 1.0) return false;
        if (y[e] == 1.0 && !uf.unite(graph.edges[e].first, graph.edges[e].second)) return false;
    }
    return true;
}

bool is_spanning_tree(const Graph& graph, const SolutionVector& y) {
    if (!is_forest(graph, y)) return false;
    const double count = std::accumulate(y.begin(), y.end(), 0.0);
    return count + 1.0 == static_cast<double>(graph.nb_nodes);
}

Completion second_stage_value(const Graph& graph, const SolutionVector& y, const Vector& d) {
    check_edge_vector(graph, d, "second stage");
    if (!is_forest(graph, y)) throw InputError("second stage: first-stage decision is not a forest");
    UnionFind uf(graph.nb_nodes);
    std::size_t components = graph.nb_nodes;
    for (std::size_t e = 0; e < y.size(); ++e)
        if (y[e] == 1.0) {
            uf.unite(graph.edges[e].first, graph.edges[e].second);
            --components;
        }
    Completion out{0.0, SolutionVector(graph.nb_edges(), 0.0)};
    for (std::size_t e : order_by(d, false)) {
        if (components <= 1) break;
        if (y[e] == 1.0) continue;
        if (uf.unite(graph.edges[e].first, graph.edges[e].second)) {
            out.z[e] = 1.0;
            out.value += d[e];
            --components;
        }
    }
    if (components > 1) throw InfeasibleError("second stage: graph is disconnected");
    return out;
}

TwoStageSolution mst_anticipative_oracle(const Graph& graph, const Vector& first_stage_costs,
                                         const ScoreDirection& theta_tilde, double kappa, const Vector& d) {
    check_edge_vector(graph, first_stage_costs, "anticipative oracle costs");
    check_edge_vector(graph, theta_tilde, "anticipative oracle scores");
    check_edge_vector(graph, d, "anticipative oracle second stage");
    const std::size_t m = graph.nb_edges();
    Vector shifted(m), effective(m);
    for (std::size_t e = 0; e < m; ++e) {
        shifted[e] = first_stage_costs[e] - kappa * theta_tilde[e];
        effective[e] = std::min(shifted[e], d[e]);
    }
    const SolutionVector tree = kruskal_min_spanning_tree(graph, effective);
    TwoStageSolution out{SolutionVector(m, 0.0), SolutionVector(m, 0.0), 0.0};
    for (std::size_t e = 0; e < m; ++e) {
        if (tree[e] == 0.0) continue;
        if (shifted[e] <= d[e]) {
            out.y[e] = 1.0;
            out.value += shifted[e];
        } else {
            out.z[e] = 1.0;
            out.value += d[e];
        }
    }
    return out;
}

void MstProblem::check(const Scenario& scenario) const {
    if (scenario.context->attributes.size() != graph_.nb_edges() || scenario.noise.size() != graph_.nb_edges())
        throw InputError("scenario does not match the graph's edge count");
}

SolutionVector MstProblem::argmax_linear(const ScoreDirection& theta) const {
    return kruskal_max_weight_forest(graph_, theta);
}

SolutionVector MstProblem::argmin_shifted(const ScoreDirection& theta_tilde, double kappa,
                                          const Scenario& scenario) const {
    check(scenario);
    return mst_anticipative_oracle(graph_, scenario.context->attributes, theta_tilde, kappa, scenario.noise).y;
}

double MstProblem::cost(const SolutionVector& y, const Scenario& scenario) const {
    check(scenario);
    return dot(scenario.context->attributes, y) + second_stage_value(graph_, y, scenario.noise).value;
}

double MstProblem::anticipative_cost(const Scenario& scenario) const {
    check(scenario);
    const ScoreDirection zero(graph_.nb_edges(), 0.0);
    return mst_anticipative_oracle(graph_, scenario.context->attributes, zero, 0.0, scenario.noise).value;
}

}  // namespace costru
