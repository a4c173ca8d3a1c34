#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "costru/oracle.hpp"
#include "costru/rng.hpp"
#include "costru/types.hpp"

namespace costru {

/// theta_e = <w | feature row e>.
struct GlmWeights {
    Vector w;
};

struct TrainConfig {
    int nb_iterations = 50;
    int nb_scenarios = 10;
    int nb_samples = 20;
    int nb_epochs = 30;
    double lr_init = 1e-5;
    double epsilon = 1e-4;
    double kappa = 1.0;
    std::uint64_t seed = 0;
    /// Decomposition targets from one unperturbed oracle call (the eps -> 0 limit).
    bool exact_decomposition = false;

    void validate() const;

    static TrainConfig toy_defaults();
    static TrainConfig mst_defaults();
};

struct AdamState {
    Vector first_moment;
    Vector second_moment;
    long step_count = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps_adam = 1e-8;

    explicit AdamState(std::size_t n = 0) : first_moment(n, 0.0), second_moment(n, 0.0) {}
};

/// Bias-corrected Adam; updates `adam` and `w` in place.
void adam_step(AdamState& adam, Vector& w, const Vector& gradient, double lr);

struct WeightTrajectory {
    std::vector<Vector> per_iteration;
    std::vector<Vector> running_average;

    void push(const Vector& w);
};

ScoreDirection score_instance(const GlmWeights& weights, const Scenario& scenario);

/// One scenario subset per context: all scenarios when the context has at most
/// `nb_scenarios`, otherwise a uniform subset. Indices ascending.
std::vector<std::size_t> subsample(const Dataset& data, int nb_scenarios, RngStream& rng);

/// Perturbed decomposition target for each scenario index in `batch`; scenario
/// `batch[k]` draws from stream (Decomposition, iteration, batch[k]).
std::vector<MomentVector> decomposition_pass(const GlmWeights& weights, const Dataset& data,
                                             const std::vector<std::size_t>& batch, const LinearOracle& oracle,
                                             const TrainConfig& config, int iteration);

/// nb_epochs sweeps of per-example Adam steps on the perturbed FY loss.
/// Draws come from stream (Coordination, iteration), consumed in example order.
GlmWeights coordination_pass(const GlmWeights& weights, const Dataset& data, const std::vector<std::size_t>& batch,
                             const std::vector<MomentVector>& targets, const LinearOracle& oracle,
                             const TrainConfig& config, AdamState& adam, int iteration);

using IterationCallback = std::function<void(int iteration, const Vector& current, const Vector& average)>;

/// Algorithm 1: w = 0; per outer iteration subsample, decompose, fresh Adam, coordinate.
WeightTrajectory train_primal_dual(const Dataset& data, const LinearOracle& oracle, const TrainConfig& config,
                                   const IterationCallback& on_iteration = nullptr);

/// Fresh Adam and one coordination pass on fixed targets (stream iteration 0).
GlmWeights imitation_fit(const Dataset& data, const std::vector<SolutionVector>& targets, const LinearOracle& oracle,
                         const TrainConfig& config);

struct PolicyEvaluation {
    double mean_cost = 0.0;
    double mean_gap = 0.0;
};

/// Relative gap to the anticipative cost; absolute difference when that cost is 0.
double relative_gap(double cost, double anticipative);

/// Deploys y = argmax_linear(theta) per scenario and averages true cost and gap.
PolicyEvaluation evaluate_policy(const GlmWeights& weights, const Dataset& data, const LinearOracle& oracle,
                                 const CostEvaluator& evaluator);

/// Averages cost and gap of given per-scenario decisions.
PolicyEvaluation evaluate_decisions(const std::vector<SolutionVector>& decisions, const Dataset& data,
                                    const CostEvaluator& evaluator);

namespace serial {
std::vector<MomentVector> decomposition_pass(const GlmWeights& weights, const Dataset& data,
                                             const std::vector<std::size_t>& batch, const LinearOracle& oracle,
                                             const TrainConfig& config, int iteration);
PolicyEvaluation evaluate_policy(const GlmWeights& weights, const Dataset& data, const LinearOracle& oracle,
                                 const CostEvaluator& evaluator);
}  // namespace serial

}  // namespace costru
