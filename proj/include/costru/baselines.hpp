#pragma once

#include <vector>

#include "costru/mst.hpp"
#include "costru/oracle.hpp"
#include "costru/toy.hpp"
#include "costru/trainer.hpp"

namespace costru {

struct SaaConfig {
    int n_saa_scenarios = 20;
    int lagrangian_iters = 100;
    double sigma0 = 1.0;

    void validate() const;
};

/// Single-scenario problem at per-edge median second-stage costs.
SolutionVector median_policy_solution(const Graph& graph, const Context& context, const std::vector<Vector>& noise);

/// Tabular analog: per solution, median cost over the given columns; returns the cheapest.
SolutionVector tabular_median_solution(const TabularProblem& problem, const std::vector<std::size_t>& columns);

/// Anticipative solution of every scenario (zero score shift).
std::vector<SolutionVector> anticipative_targets(const Dataset& data, const LinearOracle& oracle, double kappa);

/// Imitation of anticipative solutions.
GlmWeights uncoordinated_imitation(const Dataset& data, const LinearOracle& oracle, const TrainConfig& config);

struct SaaResult {
    SolutionVector y;
    double objective = 0.0;  // (1/K) sum_k cost(y, xi_k)
};

/// Mean cost of y over the scenarios.
double saa_objective(const Problem& problem, const SolutionVector& y, const std::vector<const Scenario*>& scenarios);

/// Consensus subgradient heuristic: multipliers lambda_k (zero-sum over k) shift
/// scenario k's first-stage costs; candidates are the rounded consensus and
/// every per-scenario solution, scored on the full SAA objective.
SaaResult lagrangian_saa_solution(const Problem& problem, const std::vector<const Scenario*>& scenarios,
                                  const SaaConfig& saa);

/// Per context, the SAA solution over its first n_saa_scenarios scenarios,
/// replicated as the target of each of its scenarios.
std::vector<SolutionVector> fully_coordinated_targets(const Dataset& data, const Problem& problem,
                                                      const SaaConfig& saa);

struct CoordinatedImitation {
    GlmWeights weights;
    std::vector<SolutionVector> targets;
};

CoordinatedImitation fully_coordinated_imitation(const Dataset& data, const Problem& problem, const SaaConfig& saa,
                                                 const TrainConfig& config);

}  // namespace costru
