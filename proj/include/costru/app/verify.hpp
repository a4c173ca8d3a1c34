#pragma once

#include <string>
#include <vector>

#include "costru/app/config.hpp"
#include "costru/mst.hpp"

namespace costru::app {

struct VerifyRow {
    std::string check;
    long long instance = 0;
    double measured = 0.0;
    std::string relation;  // "<=" or ">="
    double threshold = 0.0;
    bool pass = false;
};

struct VerifyOutcome {
    std::string suite;
    std::vector<VerifyRow> rows;

    bool passed() const;
    int failures() const;
};

/// convergence, mirror-descent, five-point, risk-bound, jensen-gap, conjugates, oracles, gradients.
const std::vector<std::string>& verify_suites();

/// Instance i of a suite draws from stream (Verification, suite index, i) under the run seed.
VerifyOutcome run_verify_suite(const RunConfig& config, const std::string& suite);

// Exhaustive references, independent of the union-find code.

/// Max-weight forest by enumerating all edge subsets (m <= 20).
SolutionVector enumerate_max_weight_forest(const Graph& graph, const Vector& weights);

/// Two-stage optimum by enumerating all {none, first, second} edge labellings (m <= 12).
TwoStageSolution enumerate_two_stage(const Graph& graph, const Vector& first_stage_costs,
                                     const ScoreDirection& theta_tilde, double kappa, const Vector& d);

}  // namespace costru::app
