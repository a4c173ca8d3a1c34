#include "costru/toy.hpp"

#include <cmath>
#include <string>

namespace costru {

namespace {

const double kToyCosts[2][3] = {{4.0, -1.0, -2.0}, {0.0, 0.0, 0.0}};

}  // namespace

TabularProblem::TabularProblem(std::vector<SolutionVector> vertices, std::vector<Vector> cost_rows)
    : vertices_(std::move(vertices)), cost_rows_(std::move(cost_rows)) {
    if (vertices_.empty()) throw InputError("tabular problem needs at least one solution");
    if (cost_rows_.size() != vertices_.size()) throw InputError("one cost row per solution required");
    dim_ = vertices_.front().size();
    for (const auto& v : vertices_)
        if (v.size() != dim_) throw InputError("solutions disagree on dimension");
    for (const auto& row : cost_rows_)
        if (row.size() != cost_rows_.front().size() || row.empty())
            throw InputError("cost rows disagree on scenario count");
}

std::size_t TabularProblem::column_of(const Scenario& scenario) const {
    if (scenario.noise.empty()) throw InputError("tabular scenario carries no column index");
    const double c = scenario.noise.front();
    if (c < 0.0 || c >= static_cast<double>(nb_columns()) || c != std::floor(c))
        throw InputError("tabular scenario column out of range");
    return static_cast<std::size_t>(c);
}

std::size_t TabularProblem::vertex_index(const SolutionVector& y) const {
    for (std::size_t v = 0; v < vertices_.size(); ++v)
        if (vertices_[v] == y) return v;
    throw InputError("solution is not a vertex of the tabular set");
}

SolutionVector TabularProblem::argmax_linear(const ScoreDirection& theta) const {
    if (theta.size() != dim_) throw InputError("tabular argmax: dimension mismatch");
    std::size_t best = 0;
    double best_value = dot(theta, vertices_[0]);
    for (std::size_t v = 1; v < vertices_.size(); ++v) {
        const double value = dot(theta, vertices_[v]);
        if (value > best_value) {
            best_value = value;
            best = v;
        }
    }
    return vertices_[best];
}

SolutionVector TabularProblem::argmin_shifted(const ScoreDirection& theta_tilde, double kappa,
                                              const Scenario& scenario) const {
    if (theta_tilde.size() != dim_) throw InputError("tabular argmin: dimension mismatch");
    const std::size_t col = column_of(scenario);
    std::size_t best = 0;
    double best_value = cost_rows_[0][col] - kappa * dot(theta_tilde, vertices_[0]);
    for (std::size_t v = 1; v < vertices_.size(); ++v) {
        const double value = cost_rows_[v][col] - kappa * dot(theta_tilde, vertices_[v]);
        if (value < best_value) {
            best_value = value;
            best = v;
        }
    }
    return vertices_[best];
}

double TabularProblem::cost(const SolutionVector& y, const Scenario& scenario) const {
    return cost_rows_[vertex_index(y)][column_of(scenario)];
}

double TabularProblem::anticipative_cost(const Scenario& scenario) const {
    const std::size_t col = column_of(scenario);
    double best = cost_rows_[0][col];
    for (std::size_t v = 1; v < vertices_.size(); ++v) best = std::min(best, cost_rows_[v][col]);
    return best;
}

TabularProblem make_toy_problem() {
    return TabularProblem({{0.0}, {1.0}}, {{kToyCosts[0][0], kToyCosts[0][1], kToyCosts[0][2]},
                                           {kToyCosts[1][0], kToyCosts[1][1], kToyCosts[1][2]}});
}

int toy_oracle(double theta, double kappa, int column) {
    if (column < 0 || column > 2) throw InputError("toy scenario index must be in {0,1,2}");
    const double value0 = kToyCosts[0][column];
    const double value1 = kToyCosts[1][column] - kappa * theta;
    return value1 < value0 ? 1 : 0;
}

Dataset make_toy_dataset(int train_size, Split split) {
    if (train_size < 1) throw InputError("toy dataset needs at least one scenario");
    auto context = std::make_shared<Context>();
    context->id = 0;
    context->features = Matrix(1, 1, 1.0);
    Dataset data;
    data.split = split;
    for (int i = 0; i < train_size; ++i) data.scenarios.push_back({context, {static_cast<double>(i % 3)}});
    return data;
}

}  // namespace costru
