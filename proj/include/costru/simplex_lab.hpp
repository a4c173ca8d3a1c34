#pragma once

#include <vector>

#include "costru/regularizers.hpp"
#include "costru/rng.hpp"
#include "costru/types.hpp"

namespace costru {

/// Enumerated solution set Y. Vertex k is column k of the d x |Y| vertex matrix.
class ExplicitPolytope {
public:
    /// Validates distinctness and, when `verify_exposed`, that no vertex lies in the hull of the others.
    explicit ExplicitPolytope(std::vector<SolutionVector> vertices, bool verify_exposed = true);

    std::size_t size() const { return vertices_.size(); }
    std::size_t dimension() const { return dim_; }
    const std::vector<SolutionVector>& vertices() const { return vertices_; }

    /// s = Y^T theta.
    Vector scores(const ScoreDirection& theta) const;
    /// mu = Y q.
    MomentVector moment(const DistributionVector& q) const;

private:
    std::vector<SolutionVector> vertices_;
    std::size_t dim_;
};

using ProductDistribution = std::vector<DistributionVector>;
using CostTable = std::vector<Vector>;

struct LabConfig {
    double kappa = 1.0;
    RegTag regularizer = RegTag::Negentropy;
    int max_iters = 200;
    double damping_alpha = 0.5;
    /// When false, negentropy coordination clamps mean entries at 1e-300 before the log
    /// and counts the event instead of throwing BoundaryError.
    bool strict_interior = true;

    void validate() const;
};

DistributionVector mean_distribution(const ProductDistribution& q);

double surrogate_value(const std::vector<Vector>& s_product, const ProductDistribution& q, const CostTable& costs,
                       double kappa, RegTag tag);

/// grad Omega*(s - gamma_i / kappa).
DistributionVector exact_decomposition(const Vector& s, const Vector& gamma_i, double kappa, RegTag tag);

/// Zero-sum score whose regularized prediction is the mean distribution.
/// Under negentropy a mean entry below 1e-300 throws BoundaryError, or, when
/// `clamp_events` is given, is clamped to 1e-300 and counted there.
Vector exact_coordination(const ProductDistribution& q, RegTag tag, int* clamp_events = nullptr);

double jensen_gap(const ProductDistribution& q, RegTag tag);

/// (1/N) sum <gamma_i|q_i> + kappa * jensen_gap(q).
double partial_min_surrogate(const ProductDistribution& q, const CostTable& costs, double kappa, RegTag tag);

struct ConvexityReport {
    int trials = 0;
    int violations = 0;
    double max_violation = 0.0;  // max of lhs - rhs
};

/// Random triples (q, q', t); `midpoint` fixes t = 1/2. Entries kept >= 1e-6.
ConvexityReport check_jensen_gap_convexity(RegTag tag, int n_trials, RngStream& rng, std::size_t n_scenarios = 4,
                                           std::size_t n_solutions = 5, bool midpoint = false);

struct AlternatingStep {
    int iteration = 0;          // n >= 0
    double value = 0.0;         // S(s^n, q^{n+1})
    double partial_min = 0.0;   // S(s^{n+1}, q^{n+1}) = partial minimum at q^{n+1}
    double jensen_gap = 0.0;
    ProductDistribution q;      // q^{n+1}
    Vector s;                   // s^{n+1}
};

struct AlternatingTrajectory {
    Vector s0;
    std::vector<AlternatingStep> steps;
    int clamp_events = 0;  // nonzero only without strict_interior
};

/// Exact decomposition / coordination from s0 for config.max_iters steps.
/// With `keep_iterates` false only the last step keeps q and s.
AlternatingTrajectory run_alternating_exact(const CostTable& costs, const LabConfig& config, const Vector& s0,
                                            bool keep_iterates = true);

struct ConvergenceReport {
    double max_increase = 0.0;       // worst value(t+1) - value(t), both series
    double rate_constant = 0.0;      // C = S(s0, q*) - S(s0, q^1)
    double optimum = 0.0;            // partial minimum after the long run
    int optimum_clamp_events = 0;    // the long run clamps; the checked iterations stay strict
    double max_rate_violation = 0.0; // max_t value(t) - optimum - C / t
    bool monotone = true;
    bool rate_ok = true;
};

/// Monotonicity over `iters` steps and the O(1/t) certificate against a `long_run` optimum.
ConvergenceReport check_convergence(const CostTable& costs, const LabConfig& config, const Vector& s0, int iters,
                                    int long_run, double monotone_slack = 1e-12);

struct FivePointReport {
    int probes = 0;
    int violations = 0;
    double worst_slack = 0.0;  // min of lhs - rhs
};

FivePointReport five_point_check(const CostTable& costs, const LabConfig& config, int probes, RngStream& rng,
                                 double tolerance = 1e-9);

/// lhs - rhs of the five-point inequality for one (s0, probe).
double five_point_slack(const CostTable& costs, const LabConfig& config, const Vector& s0,
                        const ProductDistribution& probe);

struct MirrorDescentResult {
    double max_deviation = 0.0;
    Vector deviation_per_iteration;
    std::vector<ProductDistribution> damped;
    std::vector<ProductDistribution> mirror;
};

/// Damped alternating scheme vs mirror descent with step eta = eta_scale * N alpha / kappa.
MirrorDescentResult run_mirror_descent_comparison(const CostTable& costs, const LabConfig& config, const Vector& s0,
                                                  int iters, double eta_scale = 1.0);

struct RiskBoundReport {
    double risk = 0.0;            // R(theta)
    double surrogate = 0.0;       // lower surrogate at theta
    double bound = 0.0;           // 3 / (2 N L kappa) sum ||gamma_i||^2
    Vector scenario_slack;        // bound_i - |S_i - R_i|
    int violations = 0;
};

RiskBoundReport risk_bound_check(const ScoreDirection& theta, const ExplicitPolytope& poly, const CostTable& costs,
                                 double kappa, RegTag tag, double L);

/// If surrogate(theta_a) <= surrogate(theta_b) then R(theta_a) - R(theta_b) <= 3/(L kappa N) sum ||gamma||^2.
/// Returns bound - (R(theta_a) - R(theta_b)) when the premise holds, +inf otherwise.
double suboptimality_slack(const ScoreDirection& theta_a, const ScoreDirection& theta_b, const ExplicitPolytope& poly,
                           const CostTable& costs, double kappa, RegTag tag, double L);

struct ConjugateReport {
    double max_abs_difference = 0.0;
    bool passed = true;
};

/// Negentropy: log-sum-exp of Y^T theta vs the moment-space log-partition.
/// Perturbation: per-draw moment-space vs distribution-space maxima (needs rng).
ConjugateReport omega_c_conjugate_check(const ScoreDirection& theta, const ExplicitPolytope& poly,
                                        const RegularizerKind& kind, RngStream* rng = nullptr);

// ---- random instances ----

CostTable random_cost_table(std::size_t n, std::size_t n_solutions, RngStream& rng, double scale = 1.0);
/// Softmax of Gaussian scores; entries bounded away from 0 for moderate spread.
DistributionVector random_distribution(std::size_t n, RngStream& rng, double spread = 1.0);
ProductDistribution random_product(std::size_t n, std::size_t n_solutions, RngStream& rng, double spread = 1.0);
/// Distinct 0/1 vectors of dimension d (all cube vertices are exposed).
ExplicitPolytope random_binary_polytope(std::size_t d, std::size_t n_solutions, RngStream& rng);

}  // namespace costru
