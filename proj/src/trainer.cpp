#include "costru/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>

#include "costru/regularizers.hpp"

namespace costru {

void TrainConfig::validate() const {
    if (nb_iterations < 1 || nb_scenarios < 1 || nb_samples < 1 || nb_epochs < 1)
        throw InputError("training counts must be >= 1");
    if (!(lr_init > 0.0)) throw InputError("lr_init must be > 0");
    if (!(epsilon > 0.0)) throw InputError("epsilon must be > 0");
    if (!(kappa > 0.0)) throw InputError("kappa must be > 0");
}

TrainConfig TrainConfig::toy_defaults() {
    TrainConfig c;
    c.nb_iterations = 20;
    c.nb_scenarios = 3;
    c.nb_samples = 1000;
    c.nb_epochs = 10;
    c.lr_init = 0.1;
    c.epsilon = 5.0;
    c.kappa = 1.0;
    return c;
}

TrainConfig TrainConfig::mst_defaults() { return TrainConfig{}; }

void adam_step(AdamState& adam, Vector& w, const Vector& gradient, double lr) {
    if (gradient.size() != w.size()) throw InputError("adam: gradient and weight sizes differ");
    if (adam.first_moment.size() != w.size()) {
        adam.first_moment.assign(w.size(), 0.0);
        adam.second_moment.assign(w.size(), 0.0);
        adam.step_count = 0;
    }
    ++adam.step_count;
    const double c1 = 1.0 - std::pow(adam.beta1, static_cast<double>(adam.step_count));
    const double c2 = 1.0 - std::pow(adam.beta2, static_cast<double>(adam.step_count));
    for (std::size_t k = 0; k < w.size(); ++k) {
        adam.first_moment[k] = adam.beta1 * adam.first_moment[k] + (1.0 - adam.beta1) * gradient[k];
        adam.second_moment[k] = adam.beta2 * adam.second_moment[k] + (1.0 - adam.beta2) * gradient[k] * gradient[k];
        const double m_hat = adam.first_moment[k] / c1;
        const double v_hat = adam.second_moment[k] / c2;
        w[k] -= lr * m_hat / (std::sqrt(v_hat) + adam.eps_adam);
    }
}

void WeightTrajectory::push(const Vector& w) {
    per_iteration.push_back(w);
    // Recomputed from scratch so the average never drifts from the recorded iterates.
    Vector avg(w.size(), 0.0);
    for (const auto& past : per_iteration)
        for (std::size_t k = 0; k < w.size(); ++k) avg[k] += past[k];
    for (double& v : avg) v /= static_cast<double>(per_iteration.size());
    running_average.push_back(std::move(avg));
}

ScoreDirection score_instance(const GlmWeights& weights, const Scenario& scenario) {
    const Matrix& f = scenario.features();
    if (f.cols != weights.w.size()) throw InputError("feature width does not match weight length");
    ScoreDirection theta(f.rows, 0.0);
    for (std::size_t e = 0; e < f.rows; ++e) {
        const double* row = f.row(e);
        double s = 0.0;
        for (std::size_t k = 0; k < f.cols; ++k) s += weights.w[k] * row[k];
        theta[e] = s;
    }
    return theta;
}

std::vector<std::size_t> subsample(const Dataset& data, int nb_scenarios, RngStream& rng) {
    std::vector<std::size_t> out;
    for (auto group : data.group_by_context()) {
        if (group.size() > static_cast<std::size_t>(nb_scenarios)) {
            // Partial Fisher-Yates with an explicit uniform index; distribution-independent of the library.
            for (std::size_t k = 0; k < static_cast<std::size_t>(nb_scenarios); ++k) {
                const std::size_t j = k + static_cast<std::size_t>(rng.next_u64() % (group.size() - k));
                std::swap(group[k], group[j]);
            }
            group.resize(static_cast<std::size_t>(nb_scenarios));
        }
        out.insert(out.end(), group.begin(), group.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

MomentVector decompose_one(const GlmWeights& weights, const Scenario& scenario, const LinearOracle& oracle,
                           const TrainConfig& config, int iteration, std::size_t index, bool parallel_samples) {
    const ScoreDirection theta = score_instance(weights, scenario);
    if (config.exact_decomposition) return oracle.argmin_shifted(theta, config.kappa, scenario);
    RngStream rng = make_rng(config.seed, stream_key(StreamPurpose::Decomposition,
                                                     static_cast<std::uint64_t>(iteration), index));
    if (parallel_samples)
        return perturbed_decomposition_target(oracle, theta, scenario, config.kappa, config.epsilon, config.nb_samples,
                                              rng);
    return serial::perturbed_decomposition_target(oracle, theta, scenario, config.kappa, config.epsilon,
                                                  config.nb_samples, rng);
}

std::string scenario_failure(std::size_t index, const std::exception& e) {
    std::ostringstream msg;
    msg << "decomposition failed on scenario " << index << ": " << e.what();
    return msg.str();
}

template <typename Fn>
void parallel_for_indices(long long count, Fn&& fn) {
    long long failed_at = count;
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (long long k = 0; k < count; ++k) {
        try {
            fn(k);
        } catch (...) {
#pragma omp critical(costru_trainer_failure)
            if (k < failed_at) {
                failed_at = k;
                failure = std::current_exception();
            }
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::vector<MomentVector> decomposition_pass(const GlmWeights& weights, const Dataset& data,
                                             const std::vector<std::size_t>& batch, const LinearOracle& oracle,
                                             const TrainConfig& config, int iteration) {
    if (batch.empty()) throw InputError("decomposition batch is empty");
    std::vector<MomentVector> targets(batch.size());
    parallel_for_indices(static_cast<long long>(batch.size()), [&](long long k) {
        const std::size_t idx = batch[static_cast<std::size_t>(k)];
        try {
            targets[k] = decompose_one(weights, data.scenarios.at(idx), oracle, config, iteration, idx, false);
        } catch (const InfeasibleError& e) {
            throw InfeasibleError(scenario_failure(idx, e));
        }
    });
    return targets;
}

namespace serial {

std::vector<MomentVector> decomposition_pass(const GlmWeights& weights, const Dataset& data,
                                             const std::vector<std::size_t>& batch, const LinearOracle& oracle,
                                             const TrainConfig& config, int iteration) {
    if (batch.empty()) throw InputError("decomposition batch is empty");
    std::vector<MomentVector> targets;
    targets.reserve(batch.size());
    for (std::size_t idx : batch) {
        try {
            targets.push_back(decompose_one(weights, data.scenarios.at(idx), oracle, config, iteration, idx, false));
        } catch (const InfeasibleError& e) {
            throw InfeasibleError(scenario_failure(idx, e));
        }
    }
    return targets;
}

}  // namespace serial

GlmWeights coordination_pass(const GlmWeights& weights, const Dataset& data, const std::vector<std::size_t>& batch,
                             const std::vector<MomentVector>& targets, const LinearOracle& oracle,
                             const TrainConfig& config, AdamState& adam, int iteration) {
    if (targets.size() != batch.size()) throw InputError("targets must align with the batch");
    GlmWeights out = weights;
    RngStream rng = make_rng(config.seed, stream_key(StreamPurpose::Coordination, static_cast<std::uint64_t>(iteration)));
    for (int epoch = 0; epoch < config.nb_epochs; ++epoch) {
        for (std::size_t k = 0; k < batch.size(); ++k) {
            const Scenario& scenario = data.scenarios.at(batch[k]);
            const ScoreDirection theta = score_instance(out, scenario);
            const LossAndGradient lg =
                perturbed_fy_gradient(oracle, theta, targets[k], config.epsilon, config.nb_samples, rng);
            const Matrix& f = scenario.features();
            Vector grad_w(f.cols, 0.0);
            for (std::size_t e = 0; e < f.rows; ++e) {
                const double g = lg.gradient[e];
                if (g == 0.0) continue;
                const double* row = f.row(e);
                for (std::size_t j = 0; j < f.cols; ++j) grad_w[j] += g * row[j];
            }
            for (double g : grad_w)
                if (!std::isfinite(g)) {
                    std::ostringstream msg;
                    msg << "non-finite gradient at iteration " << iteration << ", epoch " << epoch << ", scenario "
                        << batch[k];
                    throw std::runtime_error(msg.str());
                }
            adam_step(adam, out.w, grad_w, config.lr_init);
        }
    }
    return out;
}

WeightTrajectory train_primal_dual(const Dataset& data, const LinearOracle& oracle, const TrainConfig& config,
                                   const IterationCallback& on_iteration) {
    config.validate();
    data.validate();
    const std::size_t p = data.scenarios.front().features().cols;
    GlmWeights weights{Vector(p, 0.0)};
    WeightTrajectory traj;
    for (int t = 0; t < config.nb_iterations; ++t) {
        RngStream sub_rng = make_rng(config.seed, stream_key(StreamPurpose::Subsample, static_cast<std::uint64_t>(t)));
        const std::vector<std::size_t> batch = subsample(data, config.nb_scenarios, sub_rng);
        const std::vector<MomentVector> targets = decomposition_pass(weights, data, batch, oracle, config, t);
        AdamState adam(p);
        weights = coordination_pass(weights, data, batch, targets, oracle, config, adam, t);
        traj.push(weights.w);
        if (on_iteration) on_iteration(t, traj.per_iteration.back(), traj.running_average.back());
    }
    return traj;
}

GlmWeights imitation_fit(const Dataset& data, const std::vector<SolutionVector>& targets, const LinearOracle& oracle,
                         const TrainConfig& config) {
    config.validate();
    data.validate();
    if (targets.size() != data.size()) throw InputError("one imitation target per scenario required");
    const std::size_t p = data.scenarios.front().features().cols;
    std::vector<std::size_t> batch(data.size());
    for (std::size_t k = 0; k < batch.size(); ++k) batch[k] = k;
    AdamState adam(p);
    return coordination_pass(GlmWeights{Vector(p, 0.0)}, data, batch, targets, oracle, config, adam, 0);
}

double relative_gap(double cost, double anticipative) {
    const double diff = cost - anticipative;
    return anticipative == 0.0 ? diff : diff / std::abs(anticipative);
}

namespace {

template <bool Parallel>
PolicyEvaluation evaluate_impl(const GlmWeights& weights, const Dataset& data, const LinearOracle& oracle,
                               const CostEvaluator& evaluator) {
    data.validate();
    const std::size_t n = data.size();
    Vector costs(n), gaps(n);
    auto body = [&](long long k) {
        const Scenario& s = data.scenarios[static_cast<std::size_t>(k)];
        const SolutionVector y = oracle.argmax_linear(score_instance(weights, s));
        costs[k] = evaluator.cost(y, s);
        gaps[k] = relative_gap(costs[k], evaluator.anticipative_cost(s));
    };
    if constexpr (Parallel) {
        parallel_for_indices(static_cast<long long>(n), body);
    } else {
        for (long long k = 0; k < static_cast<long long>(n); ++k) body(k);
    }
    PolicyEvaluation out;
    for (std::size_t k = 0; k < n; ++k) {
        out.mean_cost += costs[k];
        out.mean_gap += gaps[k];
    }
    out.mean_cost /= static_cast<double>(n);
    out.mean_gap /= static_cast<double>(n);
    return out;
}

}  // namespace

PolicyEvaluation evaluate_policy(const GlmWeights& weights, const Dataset& data, const LinearOracle& oracle,
                                 const CostEvaluator& evaluator) {
    return evaluate_impl<true>(weights, data, oracle, evaluator);
}

namespace serial {
PolicyEvaluation evaluate_policy(const GlmWeights& weights, const Dataset& data, const LinearOracle& oracle,
                                 const CostEvaluator& evaluator) {
    return evaluate_impl<false>(weights, data, oracle, evaluator);
}
}  // namespace serial

PolicyEvaluation evaluate_decisions(const std::vector<SolutionVector>& decisions, const Dataset& data,
                                    const CostEvaluator& evaluator) {
    data.validate();
    if (decisions.size() != data.size()) throw InputError("one decision per scenario required");
    PolicyEvaluation out;
    for (std::size_t k = 0; k < data.size(); ++k) {
        const double c = evaluator.cost(decisions[k], data.scenarios[k]);
        out.mean_cost += c;
        out.mean_gap += relative_gap(c, evaluator.anticipative_cost(data.scenarios[k]));
    }
    out.mean_cost /= static_cast<double>(data.size());
    out.mean_gap /= static_cast<double>(data.size());
    return out;
}

}  // namespace costru
