#include "costru/app/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <spdlog/spdlog.h>

#include "costru/regularizers.hpp"
#include "costru/simplex_lab.hpp"
#include "costru/toy.hpp"

namespace costru::app {

bool VerifyOutcome::passed() const { return failures() == 0; }

int VerifyOutcome::failures() const {
    return static_cast<int>(std::count_if(rows.begin(), rows.end(), [](const VerifyRow& r) { return !r.pass; }));
}

const std::vector<std::string>& verify_suites() {
    static const std::vector<std::string> names{"convergence", "mirror-descent", "five-point", "risk-bound",
                                                "jensen-gap",  "conjugates",     "oracles",    "gradients"};
    return names;
}

namespace {

VerifyRow at_most(std::string check, long long instance, double measured, double threshold) {
    return {std::move(check), instance, measured, "<=", threshold, measured <= threshold};
}

VerifyRow at_least(std::string check, long long instance, double measured, double threshold) {
    return {std::move(check), instance, measured, ">=", threshold, measured >= threshold};
}

Vector normals(RngStream& rng, std::size_t n, double scale = 1.0) {
    Vector v(n);
    for (double& x : v) x = scale * rng.normal();
    return v;
}

/// Connected components of the subgraph on `chosen` edges, by label propagation.
std::size_t component_count(const Graph& graph, const std::vector<int>& chosen) {
    std::vector<std::size_t> label(graph.nb_nodes);
    for (std::size_t v = 0; v < graph.nb_nodes; ++v) label[v] = v;
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t e = 0; e < graph.nb_edges(); ++e) {
            if (!chosen[e]) continue;
            auto& a = label[graph.edges[e].first];
            auto& b = label[graph.edges[e].second];
            if (a != b) {
                a = b = std::min(a, b);
                changed = true;
            }
        }
    }
    std::sort(label.begin(), label.end());
    return static_cast<std::size_t>(std::unique(label.begin(), label.end()) - label.begin());
}

bool is_acyclic(const Graph& graph, const std::vector<int>& chosen) {
    const auto edges = static_cast<std::size_t>(std::count(chosen.begin(), chosen.end(), 1));
    return edges + component_count(graph, chosen) == graph.nb_nodes;
}

RngStream instance_rng(const RunConfig& config, std::size_t suite, long long i) {
    return make_rng(config.seed, stream_key(StreamPurpose::Verification, suite, static_cast<std::uint64_t>(i)));
}

std::size_t suite_index(const std::string& suite) {
    const auto& names = verify_suites();
    const auto it = std::find(names.begin(), names.end(), suite);
    if (it == names.end()) throw InputError("unknown verify suite '" + suite + "'");
    return static_cast<std::size_t>(it - names.begin());
}

constexpr std::size_t kLabScenarios = 5;
constexpr std::size_t kLabSolutions = 6;

void suite_convergence(const RunConfig& config, std::size_t code, VerifyOutcome& out) {
    LabConfig lab = config.lab;
    for (long long i = 0; i < config.verify.instances; ++i) {
        RngStream rng = instance_rng(config, code, i);
        const CostTable costs = random_cost_table(kLabScenarios, kLabSolutions, rng);
        const Vector s0 = normals(rng, kLabSolutions);
        const ConvergenceReport r =
            check_convergence(costs, lab, s0, config.verify.lab_iterations, config.verify.long_run);
        if (r.optimum_clamp_events > 0)
            spdlog::info("convergence instance {}: reference run clamped {} mean entries at 1e-300", i,
                         r.optimum_clamp_events);
        out.rows.push_back(at_most("monotone_increase", i, r.max_increase, 1e-12));
        out.rows.push_back(at_most("rate_excess", i, r.max_rate_violation, 1e-12));
    }
}

void suite_mirror(const RunConfig& config, std::size_t code, VerifyOutcome& out) {
    LabConfig lab = config.lab;
    lab.regularizer = RegTag::Negentropy;
    for (long long i = 0; i < config.verify.instances; ++i) {
        RngStream rng = instance_rng(config, code, i);
        const CostTable costs = random_cost_table(3, 4, rng);
        const Vector s0 = normals(rng, 4);
        const auto same = run_mirror_descent_comparison(costs, lab, s0, 50, 1.0);
        const auto control = run_mirror_descent_comparison(costs, lab, s0, 50, 2.0);
        out.rows.push_back(at_most("max_deviation", i, same.max_deviation, 1e-8));
        out.rows.push_back(at_least("doubled_step_deviation", i, control.max_deviation, 1e-3));
    }
}

void suite_five_point(const RunConfig& config, std::size_t code, VerifyOutcome& out) {
    for (RegTag tag : {RegTag::Negentropy, RegTag::SquaredL2}) {
        LabConfig lab = config.lab;
        lab.regularizer = tag;
        for (long long i = 0; i < config.verify.instances; ++i) {
            RngStream rng = instance_rng(config, code, i);
            const CostTable costs = random_cost_table(4, 5, rng);
            const FivePointReport r = five_point_check(costs, lab, config.verify.probes, rng, 1e-9);
            out.rows.push_back(at_least("worst_slack_" + costru::to_string(tag), i, r.worst_slack, -1e-9));
        }
    }
}

void suite_risk(const RunConfig& config, std::size_t code, VerifyOutcome& out) {
    constexpr std::size_t kDim = 4;
    for (double kappa : {0.5, 1.0, 5.0}) {
        int violations = 0;
        double worst_sub = std::numeric_limits<double>::infinity();
        for (long long i = 0; i < config.verify.risk_instances; ++i) {
            RngStream rng = instance_rng(config, code, i);
            const ExplicitPolytope poly = random_binary_polytope(kDim, kLabSolutions, rng);
            const CostTable costs = random_cost_table(3, kLabSolutions, rng);
            const Vector theta_a = normals(rng, kDim, 2.0);
            const Vector theta_b = normals(rng, kDim, 2.0);
            violations += risk_bound_check(theta_a, poly, costs, kappa, RegTag::Negentropy, 1.0).violations;
            worst_sub = std::min({worst_sub,
                                  suboptimality_slack(theta_a, theta_b, poly, costs, kappa, RegTag::Negentropy, 1.0),
                                  suboptimality_slack(theta_b, theta_a, poly, costs, kappa, RegTag::Negentropy, 1.0)});
        }
        const auto k = static_cast<long long>(std::lround(kappa * 10));
        out.rows.push_back(at_most("risk_bound_violations_kappa_x10", k, violations, 0.0));
        out.rows.push_back(at_least("suboptimality_slack_kappa_x10", k, worst_sub, 0.0));
    }
}

void suite_jensen(const RunConfig& config, std::size_t code, VerifyOutcome& out) {
    long long i = 0;
    for (RegTag tag : {RegTag::Negentropy, RegTag::SquaredL2}) {
        RngStream rng = instance_rng(config, code, i);
        const ConvexityReport r = check_jensen_gap_convexity(tag, config.verify.trials, rng, 4, 5, true);
        out.rows.push_back(at_most("midpoint_excess_" + costru::to_string(tag), i, r.max_violation, 1e-10));
        ++i;
    }
}

void suite_conjugates(const RunConfig& config, std::size_t code, VerifyOutcome& out) {
    for (long long i = 0; i < config.verify.instances; ++i) {
        RngStream rng = instance_rng(config, code, i);
        const ExplicitPolytope poly = random_binary_polytope(3, 8, rng);
        const Vector theta = normals(rng, 3, 2.0);
        const auto neg = omega_c_conjugate_check(theta, poly, RegularizerKind::negentropy());
        const auto pert = omega_c_conjugate_check(theta, poly, RegularizerKind::perturbation(1.0, 100), &rng);
        VerifyRow a = at_most("logsumexp_vs_log_partition", i, neg.max_abs_difference, 1e-12);
        a.pass = neg.passed;
        VerifyRow b = at_most("perturbed_max_per_draw", i, pert.max_abs_difference, 1e-12);
        b.pass = pert.passed;
        out.rows.push_back(a);
        out.rows.push_back(b);
    }
}

Graph random_small_graph(RngStream& rng) {
    Graph g;
    g.nb_nodes = 2 + static_cast<std::size_t>(rng.next_u64() % 5);
    const std::size_t m = 1 + static_cast<std::size_t>(rng.next_u64() % 8);
    while (g.edges.size() < m) {
        const std::size_t a = static_cast<std::size_t>(rng.next_u64() % g.nb_nodes);
        const std::size_t b = static_cast<std::size_t>(rng.next_u64() % g.nb_nodes);
        if (a != b) g.edges.emplace_back(a, b);
    }
    return g;
}

void suite_oracles(const RunConfig& config, std::size_t code, VerifyOutcome& out) {
    RngStream rng = instance_rng(config, code, 0);
    int forest_mismatch = 0;
    for (int t = 0; t < config.verify.forest_draws; ++t) {
        const Graph g = random_small_graph(rng);
        const Vector w = normals(rng, g.nb_edges());
        if (kruskal_max_weight_forest(g, w) != enumerate_max_weight_forest(g, w)) ++forest_mismatch;
    }
    out.rows.push_back(at_most("kruskal_forest_mismatches", 0, forest_mismatch, 0.0));

    int two_stage_mismatch = 0;
    const GridGraph grids[2] = {make_grid(2, 2), make_grid(2, 3)};
    for (int t = 0; t < config.verify.grid_draws; ++t) {
        const GridGraph& g = grids[t % 2];
        const std::size_t m = g.nb_edges();
        Vector c(m), d(m);
        for (double& x : c) x = rng.uniform(0.0, 2.0);
        for (double& x : d) x = rng.uniform(0.0, 2.0);
        const Vector theta = normals(rng, m);
        const double kappa = rng.uniform(0.1, 2.0);
        const TwoStageSolution fast = mst_anticipative_oracle(g, c, theta, kappa, d);
        const TwoStageSolution slow = enumerate_two_stage(g, c, theta, kappa, d);
        if (fast.y != slow.y || std::abs(fast.value - slow.value) > 1e-9) ++two_stage_mismatch;
    }
    out.rows.push_back(at_most("anticipative_oracle_mismatches", 1, two_stage_mismatch, 0.0));
}

double norm(const Vector& v) { return std::sqrt(dot(v, v)); }

void suite_gradients(const RunConfig& config, std::size_t code, VerifyOutcome& out) {
    for (long long i = 0; i < config.verify.instances; ++i) {
        RngStream rng = instance_rng(config, code, i);
        const std::size_t d = 2 + static_cast<std::size_t>(i % 4);
        const ExplicitPolytope poly = random_binary_polytope(d, std::min<std::size_t>(std::size_t{1} << d, 6), rng);
        const TabularProblem oracle(poly.vertices(), std::vector<Vector>(poly.size(), Vector(1, 0.0)));
        const Vector theta = normals(rng, d);
        const MomentVector target = poly.moment(random_distribution(poly.size(), rng));
        const double eps = 1.0;
        const int m = config.verify.gradient_samples;
        const RngStream draws = rng.derive(1);

        RngStream r0 = draws;
        const Vector g = perturbed_fy_gradient(oracle, theta, target, eps, m, r0).gradient;
        const double h = 1e-5;
        Vector fd(d);
        for (std::size_t k = 0; k < d; ++k) {
            Vector up = theta, down = theta;
            up[k] += h;
            down[k] -= h;
            RngStream ru = draws, rd = draws;
            fd[k] = (perturbed_fy_gradient(oracle, up, target, eps, m, ru).value -
                     perturbed_fy_gradient(oracle, down, target, eps, m, rd).value) /
                    (2 * h);
        }
        Vector diff(d);
        for (std::size_t k = 0; k < d; ++k) diff[k] = fd[k] - g[k];
        out.rows.push_back(at_most("perturbed_relative_error", i, norm(diff) / std::max(norm(g), 1e-300), 1e-3));

        const Vector s = normals(rng, kLabSolutions);
        const DistributionVector q = random_distribution(kLabSolutions, rng);
        const Vector exact = fy_loss_exact(s, q, RegTag::Negentropy).gradient;
        double worst = 0.0;
        const double he = 1e-6;
        for (std::size_t k = 0; k < s.size(); ++k) {
            Vector up = s, down = s;
            up[k] += he;
            down[k] -= he;
            const double fdk =
                (fy_loss_exact(up, q, RegTag::Negentropy).value - fy_loss_exact(down, q, RegTag::Negentropy).value) /
                (2 * he);
            worst = std::max(worst, std::abs(fdk - exact[k]));
        }
        out.rows.push_back(at_most("negentropy_abs_error", i, worst, 1e-6));
    }
}

}  // namespace

SolutionVector enumerate_max_weight_forest(const Graph& graph, const Vector& weights) {
    const std::size_t m = graph.nb_edges();
    if (m > 20) throw InputError("enumeration limited to 20 edges");
    if (weights.size() != m) throw InputError("weight length differs from edge count");
    SolutionVector best(m, 0.0);
    double best_value = 0.0;
    std::vector<int> chosen(m);
    for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
        double value = 0.0;
        for (std::size_t e = 0; e < m; ++e) {
            chosen[e] = (mask >> e) & 1u;
            if (chosen[e]) value += weights[e];
        }
        if (value > best_value && is_acyclic(graph, chosen)) {
            best_value = value;
            for (std::size_t e = 0; e < m; ++e) best[e] = chosen[e];
        }
    }
    return best;
}

TwoStageSolution enumerate_two_stage(const Graph& graph, const Vector& first_stage_costs,
                                     const ScoreDirection& theta_tilde, double kappa, const Vector& d) {
    const std::size_t m = graph.nb_edges();
    if (m > 12) throw InputError("enumeration limited to 12 edges");
    std::size_t total = 1;
    for (std::size_t e = 0; e < m; ++e) total *= 3;
    TwoStageSolution best;
    best.value = std::numeric_limits<double>::infinity();
    std::vector<int> label(m), in_tree(m);
    for (std::size_t code = 0; code < total; ++code) {
        std::size_t rest = code;
        std::size_t tree_edges = 0;
        double value = 0.0;
        for (std::size_t e = 0; e < m; ++e) {
            label[e] = static_cast<int>(rest % 3);
            rest /= 3;
            in_tree[e] = label[e] != 0;
            tree_edges += in_tree[e];
            if (label[e] == 1) value += first_stage_costs[e] - kappa * theta_tilde[e];
            if (label[e] == 2) value += d[e];
        }
        if (tree_edges + 1 != graph.nb_nodes || component_count(graph, in_tree) != 1) continue;
        if (value < best.value) {
            best.value = value;
            best.y.assign(m, 0.0);
            best.z.assign(m, 0.0);
            for (std::size_t e = 0; e < m; ++e) {
                if (label[e] == 1) best.y[e] = 1.0;
                if (label[e] == 2) best.z[e] = 1.0;
            }
        }
    }
    if (best.y.empty()) throw InfeasibleError("graph has no spanning tree");
    return best;
}

VerifyOutcome run_verify_suite(const RunConfig& config, const std::string& suite) {
    const std::size_t code = suite_index(suite);
    VerifyOutcome out;
    out.suite = suite;
    switch (code) {
        case 0: suite_convergence(config, code, out); break;
        case 1: suite_mirror(config, code, out); break;
        case 2: suite_five_point(config, code, out); break;
        case 3: suite_risk(config, code, out); break;
        case 4: suite_jensen(config, code, out); break;
        case 5: suite_conjugates(config, code, out); break;
        case 6: suite_oracles(config, code, out); break;
        default: suite_gradients(config, code, out); break;
    }
    spdlog::info("verify {}: {} checks, {} failed", suite, out.rows.size(), out.failures());
    return out;
}

}  // namespace costru::app
