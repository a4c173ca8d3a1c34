#include "costru/simplex_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "costru/geometry.hpp"
#include "costru/toy.hpp"

namespace costru {

namespace {

constexpr double kInteriorFloor = 1e-300;

void check_costs(const ProductDistribution& q, const CostTable& costs) {
    if (q.size() != costs.size() || q.empty()) throw InputError("one cost row per scenario distribution required");
    for (std::size_t i = 0; i < q.size(); ++i)
        if (q[i].size() != costs[i].size()) throw InputError("cost row and distribution lengths differ");
}

// grad Psi on the interior: 1 + log q.
Vector entropy_gradient(const DistributionVector& q) {
    Vector g(q.size());
    for (std::size_t k = 0; k < q.size(); ++k) {
        if (q[k] < kInteriorFloor) throw BoundaryError("distribution reached the simplex boundary", k);
        g[k] = 1.0 + std::log(q[k]);
    }
    return g;
}

Vector recentre(Vector s) {
    const double mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
    for (double& v : s) v -= mean;
    return s;
}

double expected_cost(const ProductDistribution& q, const CostTable& costs) {
    double total = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) total += dot(costs[i], q[i]);
    return total / static_cast<double>(q.size());
}

// S(s, q) with one common score for every scenario.
double common_score_surrogate(const Vector& s, const ProductDistribution& q, const CostTable& costs, double kappa,
                              RegTag tag) {
    return surrogate_value(std::vector<Vector>(q.size(), s), q, costs, kappa, tag);
}

ProductDistribution decompose_all(const Vector& s, const CostTable& costs, double kappa, RegTag tag) {
    ProductDistribution q;
    q.reserve(costs.size());
    for (const auto& gamma : costs) q.push_back(exact_decomposition(s, gamma, kappa, tag));
    return q;
}

}  // namespace

// ---- polytope ----

ExplicitPolytope::ExplicitPolytope(std::vector<SolutionVector> vertices, bool verify_exposed)
    : vertices_(std::move(vertices)) {
    if (vertices_.empty()) throw InputError("explicit polytope needs at least one vertex");
    dim_ = vertices_.front().size();
    for (const auto& v : vertices_)
        if (v.size() != dim_) throw InputError("vertices disagree on dimension");
    for (std::size_t a = 0; a < vertices_.size(); ++a)
        for (std::size_t b = a + 1; b < vertices_.size(); ++b)
            if (vertices_[a] == vertices_[b]) throw InputError("vertices must be pairwise distinct");
    if (verify_exposed && vertices_.size() > 1) {
        for (std::size_t a = 0; a < vertices_.size(); ++a) {
            std::vector<SolutionVector> others;
            for (std::size_t b = 0; b < vertices_.size(); ++b)
                if (b != a) others.push_back(vertices_[b]);
            if (!is_exposed_vertex(vertices_[a], others))
                throw InputError("vertex " + std::to_string(a) + " lies in the hull of the others");
        }
    }
}

Vector ExplicitPolytope::scores(const ScoreDirection& theta) const {
    if (theta.size() != dim_) throw InputError("score direction dimension mismatch");
    Vector s(vertices_.size());
    for (std::size_t k = 0; k < vertices_.size(); ++k) s[k] = dot(theta, vertices_[k]);
    return s;
}

MomentVector ExplicitPolytope::moment(const DistributionVector& q) const {
    if (q.size() != vertices_.size()) throw InputError("distribution length mismatch");
    MomentVector mu(dim_, 0.0);
    for (std::size_t k = 0; k < vertices_.size(); ++k)
        for (std::size_t j = 0; j < dim_; ++j) mu[j] += q[k] * vertices_[k][j];
    return mu;
}

void LabConfig::validate() const {
    if (!(kappa > 0.0)) throw InputError("kappa must be > 0");
    if (regularizer == RegTag::SparsePerturbation) throw InputError("the exact lab needs negentropy or l2");
    if (max_iters < 0) throw InputError("max_iters must be >= 0");
    if (!(damping_alpha > 0.0 && damping_alpha < 1.0)) throw InputError("damping_alpha must lie in (0,1)");
}

// ---- surrogate pieces ----

DistributionVector mean_distribution(const ProductDistribution& q) {
    if (q.empty()) throw InputError("empty product distribution");
    DistributionVector mean(q.front().size(), 0.0);
    for (const auto& qi : q) {
        if (qi.size() != mean.size()) throw InputError("product distribution rows differ in length");
        for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += qi[k];
    }
    for (double& v : mean) v /= static_cast<double>(q.size());
    return mean;
}

double surrogate_value(const std::vector<Vector>& s_product, const ProductDistribution& q, const CostTable& costs,
                       double kappa, RegTag tag) {
    check_costs(q, costs);
    if (s_product.size() != q.size()) throw InputError("one score per scenario required");
    double total = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (s_product[i].size() != q[i].size()) throw InputError("score and distribution lengths differ");
        const double fy = omega_value(q[i], tag) + omega_conjugate(s_product[i], tag) - dot(s_product[i], q[i]);
        total += dot(costs[i], q[i]) + kappa * fy;
    }
    return total / static_cast<double>(q.size());
}

DistributionVector exact_decomposition(const Vector& s, const Vector& gamma_i, double kappa, RegTag tag) {
    if (!(kappa > 0.0)) throw InputError("kappa must be > 0");
    if (s.size() != gamma_i.size()) throw InputError("score and cost row lengths differ");
    Vector shifted(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) shifted[k] = s[k] - gamma_i[k] / kappa;
    return conjugate_gradient(shifted, tag);
}

Vector exact_coordination(const ProductDistribution& q, RegTag tag, int* clamp_events) {
    const DistributionVector mean = mean_distribution(q);
    switch (tag) {
        case RegTag::Negentropy: {
            Vector s(mean.size());
            for (std::size_t k = 0; k < mean.size(); ++k) {
                double m = mean[k];
                if (m < kInteriorFloor) {
                    if (clamp_events == nullptr)
                        throw BoundaryError("mean distribution vanishes at vertex " + std::to_string(k), k);
                    ++*clamp_events;
                    m = kInteriorFloor;
                }
                s[k] = std::log(m);
            }
            return recentre(std::move(s));
        }
        case RegTag::SquaredL2:
            // q_bar + alpha 1 projects back onto q_bar, so the recentred mean is a valid subgradient.
            return recentre(mean);
        case RegTag::SparsePerturbation: break;
    }
    throw InputError("exact coordination needs negentropy or l2");
}

double jensen_gap(const ProductDistribution& q, RegTag tag) {
    double average = 0.0;
    for (const auto& qi : q) average += omega_value(qi, tag);
    average /= static_cast<double>(q.size());
    return std::max(average - omega_value(mean_distribution(q), tag), 0.0);
}

double partial_min_surrogate(const ProductDistribution& q, const CostTable& costs, double kappa, RegTag tag) {
    check_costs(q, costs);
    return expected_cost(q, costs) + kappa * jensen_gap(q, tag);
}

// ---- convexity of the Jensen gap ----

ConvexityReport check_jensen_gap_convexity(RegTag tag, int n_trials, RngStream& rng, std::size_t n_scenarios,
                                           std::size_t n_solutions, bool midpoint) {
    ConvexityReport report;
    report.max_violation = -std::numeric_limits<double>::infinity();
    auto interior = [&]() {
        ProductDistribution q = random_product(n_scenarios, n_solutions, rng, 2.0);
        for (auto& qi : q) {
            for (double& v : qi) v = std::max(v, 1e-6);
            const double total = std::accumulate(qi.begin(), qi.end(), 0.0);
            for (double& v : qi) v /= total;
        }
        return q;
    };
    for (int trial = 0; trial < n_trials; ++trial) {
        const ProductDistribution a = interior();
        const ProductDistribution b = interior();
        const double t = midpoint ? 0.5 : rng.uniform(1e-3, 1.0 - 1e-3);
        ProductDistribution mix = a;
        for (std::size_t i = 0; i < mix.size(); ++i)
            for (std::size_t k = 0; k < mix[i].size(); ++k) mix[i][k] = t * a[i][k] + (1.0 - t) * b[i][k];
        const double lhs = jensen_gap(mix, tag);
        const double rhs = t * jensen_gap(a, tag) + (1.0 - t) * jensen_gap(b, tag);
        const double violation = lhs - rhs;
        report.max_violation = std::max(report.max_violation, violation);
        if (violation > 1e-10) ++report.violations;
        ++report.trials;
    }
    return report;
}

// ---- alternating minimization ----

AlternatingTrajectory run_alternating_exact(const CostTable& costs, const LabConfig& config, const Vector& s0,
                                            bool keep_iterates) {
    config.validate();
    if (costs.empty()) throw InputError("cost table is empty");
    AlternatingTrajectory traj;
    traj.s0 = s0;
    Vector s = s0;
    for (int n = 0; n < config.max_iters; ++n) {
        AlternatingStep step;
        step.iteration = n;
        ProductDistribution q = decompose_all(s, costs, config.kappa, config.regularizer);
        step.value = common_score_surrogate(s, q, costs, config.kappa, config.regularizer);
        try {
            s = exact_coordination(q, config.regularizer, config.strict_interior ? nullptr : &traj.clamp_events);
        } catch (const BoundaryError& e) {
            throw BoundaryError(std::string(e.what()) + " at iteration " + std::to_string(n), e.vertex());
        }
        step.jensen_gap = jensen_gap(q, config.regularizer);
        step.partial_min = expected_cost(q, costs) + config.kappa * step.jensen_gap;
        if (keep_iterates || n + 1 == config.max_iters) {
            step.q = std::move(q);
            step.s = s;
        }
        traj.steps.push_back(std::move(step));
    }
    return traj;
}

ConvergenceReport check_convergence(const CostTable& costs, const LabConfig& config, const Vector& s0, int iters,
                                    int long_run, double monotone_slack) {
    LabConfig short_cfg = config;
    short_cfg.max_iters = iters + 1;
    const AlternatingTrajectory traj = run_alternating_exact(costs, short_cfg, s0, true);
    LabConfig long_cfg = config;
    long_cfg.max_iters = long_run;
    long_cfg.strict_interior = false;
    const AlternatingTrajectory best = run_alternating_exact(costs, long_cfg, s0, false);
    const AlternatingStep& last = best.steps.back();

    ConvergenceReport report;
    report.optimum = last.partial_min;
    report.optimum_clamp_events = best.clamp_events;
    report.rate_constant = common_score_surrogate(s0, last.q, costs, config.kappa, config.regularizer) -
                           common_score_surrogate(s0, traj.steps.front().q, costs, config.kappa, config.regularizer);

    for (std::size_t n = 0; n + 1 < traj.steps.size(); ++n) {
        const auto& cur = traj.steps[n];
        const auto& nxt = traj.steps[n + 1];
        report.max_increase = std::max({report.max_increase, nxt.value - cur.value, nxt.partial_min - cur.partial_min,
                                        nxt.value - cur.partial_min, cur.partial_min - cur.value});
    }
    report.monotone = report.max_increase <= monotone_slack;

    report.max_rate_violation = -std::numeric_limits<double>::infinity();
    for (int n = 1; n <= iters; ++n) {
        const double excess = traj.steps[n].value - report.optimum - report.rate_constant / n;
        report.max_rate_violation = std::max(report.max_rate_violation, excess);
    }
    report.rate_ok = report.max_rate_violation <= monotone_slack;
    return report;
}

// ---- five-point property ----

double five_point_slack(const CostTable& costs, const LabConfig& config, const Vector& s0,
                        const ProductDistribution& probe) {
    const double kappa = config.kappa;
    const RegTag tag = config.regularizer;
    const ProductDistribution q1 = decompose_all(s0, costs, kappa, tag);
    const Vector s1 = exact_coordination(q1, tag);
    const double lhs = partial_min_surrogate(probe, costs, kappa, tag) - partial_min_surrogate(q1, costs, kappa, tag);
    double rhs = 0.0;
    for (std::size_t i = 0; i < costs.size(); ++i)
        rhs += dot(s1, q1[i]) + dot(s0, probe[i]) - dot(s1, probe[i]) - dot(s0, q1[i]);
    rhs *= kappa / static_cast<double>(costs.size());
    return lhs - rhs;
}

FivePointReport five_point_check(const CostTable& costs, const LabConfig& config, int probes, RngStream& rng,
                                 double tolerance) {
    config.validate();
    FivePointReport report;
    report.worst_slack = std::numeric_limits<double>::infinity();
    const std::size_t n_solutions = costs.front().size();
    for (int p = 0; p < probes; ++p) {
        Vector s0(n_solutions);
        for (double& v : s0) v = 2.0 * rng.normal();
        const ProductDistribution probe = random_product(costs.size(), n_solutions, rng, 2.0);
        const double slack = five_point_slack(costs, config, s0, probe);
        report.worst_slack = std::min(report.worst_slack, slack);
        if (slack < -tolerance) ++report.violations;
        ++report.probes;
    }
    return report;
}

// ---- mirror descent equivalence ----

MirrorDescentResult run_mirror_descent_comparison(const CostTable& costs, const LabConfig& config, const Vector& s0,
                                                  int iters, double eta_scale) {
    config.validate();
    if (config.regularizer != RegTag::Negentropy) throw InputError("mirror descent comparison uses negentropy");
    const double kappa = config.kappa;
    const double alpha = config.damping_alpha;
    const std::size_t n = costs.size();
    const double eta = eta_scale * static_cast<double>(n) * alpha / kappa;

    MirrorDescentResult out;

    // (a) damped alternating scheme on scores
    Vector s = s0;
    for (int t = 0; t < iters; ++t) {
        ProductDistribution q = decompose_all(s, costs, kappa, RegTag::Negentropy);
        const Vector half = exact_coordination(q, RegTag::Negentropy);
        for (std::size_t k = 0; k < s.size(); ++k) s[k] = alpha * half[k] + (1.0 - alpha) * s[k];
        out.damped.push_back(std::move(q));
    }

    // (b) mirror descent on the partial minimum with mirror map sum_i Psi(q_i)
    ProductDistribution q = decompose_all(s0, costs, kappa, RegTag::Negentropy);
    for (int t = 0; t < iters; ++t) {
        out.mirror.push_back(q);
        const Vector grad_mean = entropy_gradient(mean_distribution(q));
        ProductDistribution next;
        next.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            const Vector grad_i = entropy_gradient(q[i]);
            Vector dual(grad_i.size());
            for (std::size_t k = 0; k < dual.size(); ++k) {
                const double g = (costs[i][k] + kappa * (grad_i[k] - grad_mean[k])) / static_cast<double>(n);
                dual[k] = grad_i[k] - eta * g;
            }
            next.push_back(softmax_distribution(dual));
        }
        q = std::move(next);
    }

    for (int t = 0; t < iters; ++t) {
        double dev = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < out.damped[t][i].size(); ++k)
                dev = std::max(dev, std::abs(out.damped[t][i][k] - out.mirror[t][i][k]));
        out.deviation_per_iteration.push_back(dev);
        out.max_deviation = std::max(out.max_deviation, dev);
    }
    return out;
}

// ---- risk bound ----

namespace {

struct RiskPieces {
    double risk = 0.0;
    double surrogate = 0.0;
    Vector risk_i;
    Vector surrogate_i;
};

RiskPieces risk_pieces(const ScoreDirection& theta, const ExplicitPolytope& poly, const CostTable& costs, double kappa,
                       RegTag tag) {
    if (!(kappa > 0.0)) throw InputError("kappa must be > 0");
    const Vector s = poly.scores(theta);
    const DistributionVector prediction = conjugate_gradient(s, tag);
    RiskPieces out;
    for (const auto& gamma : costs) {
        if (gamma.size() != poly.size()) throw InputError("cost row length differs from |Y|");
        const DistributionVector q_hat = exact_decomposition(s, gamma, kappa, tag);
        const double fy = omega_conjugate(s, tag) + omega_value(q_hat, tag) - dot(s, q_hat);
        out.risk_i.push_back(dot(gamma, prediction));
        out.surrogate_i.push_back(dot(gamma, q_hat) + kappa * fy);
    }
    const double n = static_cast<double>(costs.size());
    out.risk = std::accumulate(out.risk_i.begin(), out.risk_i.end(), 0.0) / n;
    out.surrogate = std::accumulate(out.surrogate_i.begin(), out.surrogate_i.end(), 0.0) / n;
    return out;
}

}  // namespace

RiskBoundReport risk_bound_check(const ScoreDirection& theta, const ExplicitPolytope& poly, const CostTable& costs,
                                 double kappa, RegTag tag, double L) {
    if (!(L > 0.0)) throw InputError("strong convexity constant must be > 0");
    const RiskPieces pieces = risk_pieces(theta, poly, costs, kappa, tag);
    RiskBoundReport report;
    report.risk = pieces.risk;
    report.surrogate = pieces.surrogate;
    double total = 0.0;
    for (std::size_t i = 0; i < costs.size(); ++i) {
        const double bound_i = 3.0 * dot(costs[i], costs[i]) / (2.0 * L * kappa);
        total += bound_i;
        const double slack = bound_i - std::abs(pieces.surrogate_i[i] - pieces.risk_i[i]);
        report.scenario_slack.push_back(slack);
        if (slack < -1e-12 * std::max(1.0, bound_i)) ++report.violations;
    }
    report.bound = total / static_cast<double>(costs.size());
    if (std::abs(report.surrogate - report.risk) > report.bound + 1e-12 * std::max(1.0, report.bound))
        ++report.violations;
    return report;
}

double suboptimality_slack(const ScoreDirection& theta_a, const ScoreDirection& theta_b, const ExplicitPolytope& poly,
                           const CostTable& costs, double kappa, RegTag tag, double L) {
    const RiskPieces a = risk_pieces(theta_a, poly, costs, kappa, tag);
    const RiskPieces b = risk_pieces(theta_b, poly, costs, kappa, tag);
    if (a.surrogate > b.surrogate) return std::numeric_limits<double>::infinity();
    double norms = 0.0;
    for (const auto& gamma : costs) norms += dot(gamma, gamma);
    const double bound = 3.0 * norms / (L * kappa * static_cast<double>(costs.size()));
    return bound - (a.risk - b.risk);
}

// ---- conjugate identity ----

ConjugateReport omega_c_conjugate_check(const ScoreDirection& theta, const ExplicitPolytope& poly,
                                        const RegularizerKind& kind, RngStream* rng) {
    ConjugateReport report;
    if (kind.tag == RegTag::Negentropy) {
        const double distribution_side = logsumexp_conjugate(poly.scores(theta));
        // Moment side: log sum_y exp(<theta|y>) accumulated vertex by vertex in extended precision.
        long double top = -std::numeric_limits<long double>::infinity();
        for (const auto& y : poly.vertices()) {
            long double v = 0.0L;
            for (std::size_t j = 0; j < y.size(); ++j) v += static_cast<long double>(theta[j]) * y[j];
            top = std::max(top, v);
        }
        long double total = 0.0L;
        for (const auto& y : poly.vertices()) {
            long double v = 0.0L;
            for (std::size_t j = 0; j < y.size(); ++j) v += static_cast<long double>(theta[j]) * y[j];
            total += std::exp(v - top);
        }
        const double moment_side = static_cast<double>(top + std::log(total));
        report.max_abs_difference = std::abs(distribution_side - moment_side);
        report.passed = report.max_abs_difference <= 1e-12 * std::max(1.0, std::abs(moment_side));
        return report;
    }
    if (kind.tag == RegTag::SparsePerturbation) {
        if (rng == nullptr) throw InputError("perturbation conjugate check needs a random stream");
        kind.validate();
        const TabularProblem oracle(poly.vertices(), std::vector<Vector>(poly.size(), Vector(1, 0.0)));
        const Vector s = poly.scores(theta);
        const Matrix z = draw_normals(*rng, static_cast<std::size_t>(kind.nb_samples), poly.dimension());
        for (std::size_t j = 0; j < z.rows; ++j) {
            Vector perturbed(theta.size());
            for (std::size_t k = 0; k < theta.size(); ++k) perturbed[k] = theta[k] + kind.epsilon * z(j, k);
            const double moment_side = dot(perturbed, oracle.argmax_linear(perturbed));
            double distribution_side = -std::numeric_limits<double>::infinity();
            for (std::size_t v = 0; v < poly.size(); ++v) {
                double yz = 0.0;
                for (std::size_t k = 0; k < theta.size(); ++k) yz += poly.vertices()[v][k] * z(j, k);
                distribution_side = std::max(distribution_side, s[v] + kind.epsilon * yz);
            }
            report.max_abs_difference = std::max(report.max_abs_difference, std::abs(moment_side - distribution_side));
        }
        report.passed = report.max_abs_difference <= 1e-12 * std::max(1.0, std::abs(kind.epsilon));
        return report;
    }
    throw InputError("conjugate check covers negentropy and perturbation");
}

// ---- random instances ----

CostTable random_cost_table(std::size_t n, std::size_t n_solutions, RngStream& rng, double scale) {
    CostTable costs(n, Vector(n_solutions));
    for (auto& row : costs)
        for (double& v : row) v = scale * rng.normal();
    return costs;
}

DistributionVector random_distribution(std::size_t n, RngStream& rng, double spread) {
    Vector s(n);
    for (double& v : s) v = spread * rng.normal();
    return softmax_distribution(s);
}

ProductDistribution random_product(std::size_t n, std::size_t n_solutions, RngStream& rng, double spread) {
    ProductDistribution q;
    for (std::size_t i = 0; i < n; ++i) q.push_back(random_distribution(n_solutions, rng, spread));
    return q;
}

ExplicitPolytope random_binary_polytope(std::size_t d, std::size_t n_solutions, RngStream& rng) {
    if (d >= 20 || n_solutions > (std::size_t{1} << d)) throw InputError("too many binary vertices requested");
    std::vector<std::size_t> codes(std::size_t{1} << d);
    std::iota(codes.begin(), codes.end(), std::size_t{0});
    std::shuffle(codes.begin(), codes.end(), rng.engine());
    std::vector<SolutionVector> vertices;
    for (std::size_t k = 0; k < n_solutions; ++k) {
        SolutionVector y(d);
        for (std::size_t j = 0; j < d; ++j) y[j] = static_cast<double>((codes[k] >> j) & 1U);
        vertices.push_back(std::move(y));
    }
    return ExplicitPolytope(std::move(vertices), false);
}

}  // namespace costru
