#pragma once

#include "costru/types.hpp"

namespace costru {

/// Linear maximization over the solution set Y of a problem, plus the
/// cost-shifted single-scenario solver used by decomposition.
///
/// Implementations are immutable and must tolerate concurrent calls.
/// Ties are broken toward the lowest index.
class LinearOracle {
public:
    virtual ~LinearOracle() = default;

    /// Solution dimension d.
    virtual std::size_t dimension() const = 0;

    /// argmax_{y in Y} <theta|y>.
    virtual SolutionVector argmax_linear(const ScoreDirection& theta) const = 0;

    /// argmin_{y in Y} c(y, scenario) - kappa <theta_tilde|y>.
    virtual SolutionVector argmin_shifted(const ScoreDirection& theta_tilde, double kappa,
                                          const Scenario& scenario) const = 0;
};

/// True cost of a deployed decision and the per-scenario anticipative optimum.
class CostEvaluator {
public:
    virtual ~CostEvaluator() = default;

    virtual double cost(const SolutionVector& y, const Scenario& scenario) const = 0;
    virtual double anticipative_cost(const Scenario& scenario) const = 0;
};

/// Both faces of a benchmark problem.
class Problem : public LinearOracle, public CostEvaluator {};

}  // namespace costru
