#pragma once

#include <utility>
#include <vector>

#include "costru/oracle.hpp"

namespace costru {

class UnionFind {
public:
    explicit UnionFind(std::size_t n);
    std::size_t find(std::size_t x);
    /// Merges the two sets; false if already joined.
    bool unite(std::size_t a, std::size_t b);
    bool same(std::size_t a, std::size_t b) { return find(a) == find(b); }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> rank_;
};

struct Graph {
    std::size_t nb_nodes = 0;
    std::vector<std::pair<std::size_t, std::size_t>> edges;

    std::size_t nb_edges() const { return edges.size(); }
};

/// 4-neighbour grid. Nodes row-major; horizontal edges first (row-major),
/// then vertical edges (row-major).
struct GridGraph : Graph {
    std::size_t rows = 0;
    std::size_t cols = 0;
};

GridGraph make_grid(std::size_t rows, std::size_t cols);

/// Greedy by decreasing weight (ties to lower index), skipping cycles and weights <= 0.
SolutionVector kruskal_max_weight_forest(const Graph& graph, const Vector& weights);

/// Minimum spanning tree by increasing weight, ties to lower index. Throws if disconnected.
SolutionVector kruskal_min_spanning_tree(const Graph& graph, const Vector& weights);

bool is_forest(const Graph& graph, const SolutionVector& y);
bool is_spanning_tree(const Graph& graph, const SolutionVector& y);

struct Completion {
    double value = 0.0;
    SolutionVector z;
};

/// Cheapest completion of forest y into a spanning tree under second-stage costs d.
Completion second_stage_value(const Graph& graph, const SolutionVector& y, const Vector& d);

struct TwoStageSolution {
    SolutionVector y;
    SolutionVector z;
    double value = 0.0;  // sum (c - kappa theta) y + sum d z
};

/// Exact min over forests y of sum (c_e - kappa theta_e) y_e + Q(y; d): one MST under
/// min(c_e - kappa theta_e, d_e), edge attributed to the first stage on ties.
TwoStageSolution mst_anticipative_oracle(const Graph& graph, const Vector& first_stage_costs,
                                         const ScoreDirection& theta_tilde, double kappa, const Vector& d);

/// Two-stage spanning tree on a fixed graph. Scenario context attributes hold the
/// first-stage costs c, scenario noise holds the second-stage costs d.
class MstProblem : public Problem {
public:
    explicit MstProblem(Graph graph) : graph_(std::move(graph)) {}

    std::size_t dimension() const override { return graph_.nb_edges(); }
    SolutionVector argmax_linear(const ScoreDirection& theta) const override;
    SolutionVector argmin_shifted(const ScoreDirection& theta_tilde, double kappa,
                                  const Scenario& scenario) const override;
    double cost(const SolutionVector& y, const Scenario& scenario) const override;
    double anticipative_cost(const Scenario& scenario) const override;

    const Graph& graph() const { return graph_; }

private:
    void check(const Scenario& scenario) const;

    Graph graph_;
};

}  // namespace costru
