#include "costru/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <set>

namespace costru {

void SaaConfig::validate() const {
    if (n_saa_scenarios < 1 || lagrangian_iters < 1) throw InputError("SAA counts must be >= 1");
    if (!(sigma0 > 0.0)) throw InputError("sigma0 must be > 0");
}

namespace {

double median_of(Vector v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

SolutionVector median_policy_solution(const Graph& graph, const Context& context, const std::vector<Vector>& noise) {
    if (noise.empty()) throw InputError("median policy needs at least one noise sample");
    const std::size_t m = graph.nb_edges();
    Vector median(m);
    for (std::size_t e = 0; e < m; ++e) {
        Vector column;
        column.reserve(noise.size());
        for (const auto& d : noise) {
            if (d.size() != m) throw InputError("noise sample length differs from edge count");
            column.push_back(d[e]);
        }
        median[e] = median_of(std::move(column));
    }
    return mst_anticipative_oracle(graph, context.attributes, Vector(m, 0.0), 0.0, median).y;
}

SolutionVector tabular_median_solution(const TabularProblem& problem, const std::vector<std::size_t>& columns) {
    if (columns.empty()) throw InputError("median policy needs at least one scenario");
    std::size_t best = 0;
    double best_value = 0.0;
    for (std::size_t v = 0; v < problem.vertices().size(); ++v) {
        Vector costs;
        for (std::size_t c : columns) costs.push_back(problem.table(v, c));
        const double value = median_of(std::move(costs));
        if (v == 0 || value < best_value) {
            best = v;
            best_value = value;
        }
    }
    return problem.vertices()[best];
}

std::vector<SolutionVector> anticipative_targets(const Dataset& data, const LinearOracle& oracle, double kappa) {
    std::vector<SolutionVector> targets;
    targets.reserve(data.size());
    const ScoreDirection zero(oracle.dimension(), 0.0);
    for (const auto& s : data.scenarios) targets.push_back(oracle.argmin_shifted(zero, kappa, s));
    return targets;
}

GlmWeights uncoordinated_imitation(const Dataset& data, const LinearOracle& oracle, const TrainConfig& config) {
    return imitation_fit(data, anticipative_targets(data, oracle, config.kappa), oracle, config);
}

double saa_objective(const Problem& problem, const SolutionVector& y, const std::vector<const Scenario*>& scenarios) {
    double total = 0.0;
    for (const Scenario* s : scenarios) total += problem.cost(y, *s);
    return total / static_cast<double>(scenarios.size());
}

SaaResult lagrangian_saa_solution(const Problem& problem, const std::vector<const Scenario*>& scenarios,
                                  const SaaConfig& saa) {
    saa.validate();
    if (scenarios.size() < 2) throw InputError("the Lagrangian heuristic needs at least two scenarios");
    const std::size_t k_count = scenarios.size();
    const std::size_t d = problem.dimension();
    std::vector<Vector> lambda(k_count, Vector(d, 0.0));

    SaaResult best;
    best.objective = std::numeric_limits<double>::infinity();
    std::set<SolutionVector> seen;
    auto consider = [&](const SolutionVector& y) {
        if (!seen.insert(y).second) return;
        const double value = saa_objective(problem, y, scenarios);
        if (value < best.objective) {
            best.objective = value;
            best.y = y;
        }
    };

    for (int j = 1; j <= saa.lagrangian_iters; ++j) {
        std::vector<SolutionVector> ys(k_count);
        for (std::size_t k = 0; k < k_count; ++k) {
            ScoreDirection shift(d);
            for (std::size_t e = 0; e < d; ++e) shift[e] = -lambda[k][e];
            ys[k] = problem.argmin_shifted(shift, 1.0, *scenarios[k]);
        }
        Vector mean(d, 0.0);
        for (const auto& y : ys)
            for (std::size_t e = 0; e < d; ++e) mean[e] += y[e] / static_cast<double>(k_count);

        // Rounded consensus: edges with mean >= 1/2, greedily by decreasing mean.
        Vector rounded(d);
        for (std::size_t e = 0; e < d; ++e) rounded[e] = mean[e] - 0.5 + 1e-9;
        consider(problem.argmax_linear(rounded));
        for (const auto& y : ys) consider(y);

        bool consensus = true;
        for (const auto& y : ys)
            if (y != ys.front()) consensus = false;
        if (consensus) break;

        const double sigma = saa.sigma0 / std::sqrt(static_cast<double>(j));
        for (std::size_t k = 0; k < k_count; ++k)
            for (std::size_t e = 0; e < d; ++e) lambda[k][e] += sigma * (ys[k][e] - mean[e]);
        for (std::size_t e = 0; e < d; ++e) {
            double total = 0.0;
            for (std::size_t k = 0; k < k_count; ++k) total += lambda[k][e];
            for (std::size_t k = 0; k < k_count; ++k) lambda[k][e] -= total / static_cast<double>(k_count);
        }
    }
    return best;
}

std::vector<SolutionVector> fully_coordinated_targets(const Dataset& data, const Problem& problem,
                                                      const SaaConfig& saa) {
    saa.validate();
    data.validate();
    const auto groups = data.group_by_context();
    std::vector<SolutionVector> per_group(groups.size());
    const long long count = static_cast<long long>(groups.size());
    long long failed_at = count;
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (long long g = 0; g < count; ++g) {
        try {
            const auto& group = groups[static_cast<std::size_t>(g)];
            std::vector<const Scenario*> scenarios;
            for (std::size_t k = 0; k < group.size() && k < static_cast<std::size_t>(saa.n_saa_scenarios); ++k)
                scenarios.push_back(&data.scenarios[group[k]]);
            if (scenarios.size() == 1) {
                per_group[g] = problem.argmin_shifted(ScoreDirection(problem.dimension(), 0.0), 1.0, *scenarios[0]);
            } else {
                per_group[g] = lagrangian_saa_solution(problem, scenarios, saa).y;
            }
        } catch (...) {
#pragma omp critical(costru_saa_failure)
            if (g < failed_at) {
                failed_at = g;
                failure = std::current_exception();
            }
        }
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<SolutionVector> targets(data.size());
    for (std::size_t g = 0; g < groups.size(); ++g)
        for (std::size_t idx : groups[g]) targets[idx] = per_group[g];
    return targets;
}

CoordinatedImitation fully_coordinated_imitation(const Dataset& data, const Problem& problem, const SaaConfig& saa,
                                                 const TrainConfig& config) {
    CoordinatedImitation out;
    out.targets = fully_coordinated_targets(data, problem, saa);
    out.weights = imitation_fit(data, out.targets, problem, config);
    return out;
}

}  // namespace costru
