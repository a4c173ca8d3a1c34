#pragma once

#include <vector>

#include "costru/oracle.hpp"

namespace costru {

/// Finite solution set with a cost table indexed by (solution, scenario column).
/// A scenario selects its column through noise[0].
class TabularProblem : public Problem {
public:
    TabularProblem(std::vector<SolutionVector> vertices, std::vector<Vector> cost_rows);

    std::size_t dimension() const override { return dim_; }
    SolutionVector argmax_linear(const ScoreDirection& theta) const override;
    SolutionVector argmin_shifted(const ScoreDirection& theta_tilde, double kappa,
                                  const Scenario& scenario) const override;
    double cost(const SolutionVector& y, const Scenario& scenario) const override;
    double anticipative_cost(const Scenario& scenario) const override;

    const std::vector<SolutionVector>& vertices() const { return vertices_; }
    std::size_t nb_columns() const { return cost_rows_.front().size(); }
    double table(std::size_t vertex, std::size_t column) const { return cost_rows_[vertex][column]; }
    std::size_t vertex_index(const SolutionVector& y) const;

private:
    std::size_t column_of(const Scenario& scenario) const;

    std::vector<SolutionVector> vertices_;
    std::vector<Vector> cost_rows_;
    std::size_t dim_;
};

/// Y = {0, 1} in R with costs c(0, .) = (4, -1, -2) and c(1, .) = (0, 0, 0).
TabularProblem make_toy_problem();

/// argmin_{y in {0,1}} cost[y][column] - kappa theta y, ties to y = 0.
int toy_oracle(double theta, double kappa, int column);

/// Non-contextual toy data: one shared context with the constant feature 1.
/// Scenario i uses column i mod 3, so train_size = 3 represents the uniform law exactly.
Dataset make_toy_dataset(int train_size, Split split = Split::Train);

}  // namespace costru
