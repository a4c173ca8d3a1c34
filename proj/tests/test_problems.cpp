#include <doctest.h>

#include <cmath>
#include <random>
#include <filesystem>

#include "costru/dataset_io.hpp"
#include "costru/generator.hpp"
#include "costru/mst.hpp"
#include "costru/toy.hpp"
#include "test_support.hpp"

using namespace costru;

namespace {

// ---- independent references ----

bool acyclic_by_dfs(const Graph& g, const std::vector<int>& chosen) {
    std::vector<std::vector<std::size_t>> adj(g.nb_nodes);
    std::size_t m = 0;
    for (std::size_t e = 0; e < g.nb_edges(); ++e)
        if (chosen[e]) {
            adj[g.edges[e].first].push_back(g.edges[e].second);
            adj[g.edges[e].second].push_back(g.edges[e].first);
            ++m;
        }
    std::vector<int> seen(g.nb_nodes, 0);
    std::size_t components = 0;
    for (std::size_t s = 0; s < g.nb_nodes; ++s) {
        if (seen[s]) continue;
        ++components;
        std::vector<std::size_t> stack{s};
        seen[s] = 1;
        while (!stack.empty()) {
            const std::size_t v = stack.back();
            stack.pop_back();
            for (std::size_t u : adj[v])
                if (!seen[u]) {
                    seen[u] = 1;
                    stack.push_back(u);
                }
        }
    }
    return m + components == g.nb_nodes;
}

double best_forest_weight(const Graph& g, const Vector& w) {
    double best = 0.0;
    const std::size_t m = g.nb_edges();
    std::vector<int> chosen(m);
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        double total = 0.0;
        for (std::size_t e = 0; e < m; ++e) {
            chosen[e] = (mask >> e) & 1u;
            if (chosen[e]) total += w[e];
        }
        if (total > best && acyclic_by_dfs(g, chosen)) best = total;
    }
    return best;
}

bool spanning_tree_by_dfs(const Graph& g, const std::vector<int>& chosen) {
    const auto m = static_cast<std::size_t>(std::count(chosen.begin(), chosen.end(), 1));
    return m + 1 == g.nb_nodes && acyclic_by_dfs(g, chosen);
}

/// min over (y, z) with y + z a spanning tree of sum (c - kappa theta) y + d z.
double best_two_stage(const Graph& g, const Vector& c, const Vector& theta, double kappa, const Vector& d) {
    const std::size_t m = g.nb_edges();
    double best = 1e300;
    std::vector<int> chosen(m);
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        for (std::size_t e = 0; e < m; ++e) chosen[e] = (mask >> e) & 1u;
        if (!spanning_tree_by_dfs(g, chosen)) continue;
        double total = 0.0;
        for (std::size_t e = 0; e < m; ++e)
            if (chosen[e]) total += std::min(c[e] - kappa * theta[e], d[e]);
        best = std::min(best, total);
    }
    return best;
}

Graph triangle() { return Graph{3, {{0, 1}, {1, 2}, {2, 0}}}; }

}  // namespace

// ---- toy ----

TEST_CASE("toy oracle examples") {
    CHECK(toy_oracle(0.0, 1.0, 0) == 1);
    CHECK(toy_oracle(0.0, 1.0, 1) == 0);
    CHECK(toy_oracle(0.0, 1.0, 2) == 0);
    CHECK(toy_oracle(-5.0, 1.0, 0) == 0);
    CHECK_THROWS_AS(toy_oracle(0.0, 1.0, 3), InputError);
}

TEST_CASE("toy problem agrees with the toy oracle and its cost table") {
    const TabularProblem toy = make_toy_problem();
    const Dataset data = make_toy_dataset(3);
    for (int col = 0; col < 3; ++col)
        for (double theta : {-5.0, -1.5, 0.0, 0.5, 1.5, 3.0})
            CHECK(toy.argmin_shifted({theta}, 1.0, data.scenarios[col])[0] == toy_oracle(theta, 1.0, col));
    // theta > 0 deploys y = 1 with mean cost 0; theta < 0 deploys y = 0 with mean cost 1/3.
    double c1 = 0.0, c0 = 0.0;
    for (const auto& s : data.scenarios) {
        c1 += toy.cost(toy.argmax_linear({0.5}), s) / 3.0;
        c0 += toy.cost(toy.argmax_linear({-0.5}), s) / 3.0;
    }
    CHECK(c1 == 0.0);
    CHECK(c0 == doctest::Approx(1.0 / 3.0));
    CHECK(toy.anticipative_cost(data.scenarios[0]) == 0.0);
    CHECK(toy.anticipative_cost(data.scenarios[1]) == -1.0);
    CHECK(toy.anticipative_cost(data.scenarios[2]) == -2.0);
}

TEST_CASE("toy dataset cycles through the three columns on one context") {
    const Dataset data = make_toy_dataset(7);
    REQUIRE(data.size() == 7);
    for (std::size_t i = 0; i < data.size(); ++i) {
        CHECK(data.scenarios[i].noise[0] == double(i % 3));
        CHECK(data.scenarios[i].context == data.scenarios[0].context);
        CHECK(data.scenarios[i].features()(0, 0) == 1.0);
    }
}

// ---- spanning trees ----

TEST_CASE("grid edge order: horizontal row-major then vertical row-major") {
    const GridGraph g = make_grid(2, 3);
    CHECK(g.nb_nodes == 6);
    const std::vector<std::pair<std::size_t, std::size_t>> expected{{0, 1}, {1, 2}, {3, 4}, {4, 5},
                                                                     {0, 3}, {1, 4}, {2, 5}};
    CHECK(g.edges == expected);
    CHECK(make_grid(6, 6).nb_edges() == 60);
}

TEST_CASE("max-weight forest examples") {
    CHECK(kruskal_max_weight_forest(triangle(), {-1, -2, -3}) == SolutionVector{0, 0, 0});
    const SolutionVector y = kruskal_max_weight_forest(triangle(), {3, 2, -1});
    CHECK(y == SolutionVector{1, 1, 0});
    CHECK(dot(y, {3, 2, -1}) == 5.0);
}

TEST_CASE("max-weight forest matches enumeration on a 2x2 grid") {
    const GridGraph g = make_grid(2, 2);
    RngStream rng(21, 0);
    for (int t = 0; t < 500; ++t) {
        Vector w(g.nb_edges());
        for (double& x : w) x = rng.normal();
        const SolutionVector y = kruskal_max_weight_forest(g, w);
        std::vector<int> chosen(y.begin(), y.end());
        CHECK(acyclic_by_dfs(g, chosen));
        CHECK(dot(y, w) == doctest::Approx(best_forest_weight(g, w)).epsilon(1e-12));
    }
}

TEST_CASE("minimum spanning tree and forest predicates") {
    const GridGraph g = make_grid(3, 3);
    RngStream rng(22, 0);
    Vector w(g.nb_edges());
    for (double& x : w) x = rng.uniform();
    const SolutionVector t = kruskal_min_spanning_tree(g, w);
    CHECK(is_spanning_tree(g, t));
    CHECK(is_forest(g, t));
    CHECK_FALSE(is_forest(triangle(), {1, 1, 1}));
    CHECK_THROWS_AS(kruskal_min_spanning_tree(Graph{3, {{0, 1}}}, {1.0}), InfeasibleError);
}

TEST_CASE("second-stage completion examples") {
    const Graph tri = triangle();
    const Completion done = second_stage_value(tri, {1, 1, 0}, {9, 9, 9});
    CHECK(done.value == 0.0);
    CHECK(done.z == SolutionVector{0, 0, 0});
    const Completion one = second_stage_value(tri, {1, 0, 0}, {7, 5, 2});
    CHECK(one.z == SolutionVector{0, 0, 1});
    CHECK(one.value == 2.0);
}

TEST_CASE("empty first stage completes into a plain minimum spanning tree") {
    const GridGraph g = make_grid(3, 3);
    RngStream rng(23, 0);
    for (int t = 0; t < 20; ++t) {
        Vector d(g.nb_edges());
        for (double& x : d) x = rng.uniform(1.0, 3.0);
        const Completion c = second_stage_value(g, SolutionVector(g.nb_edges(), 0.0), d);
        // Reference: min over spanning trees by enumeration of the two-stage problem with prohibitive c.
        const Vector huge(g.nb_edges(), 1e6);
        CHECK(c.value == doctest::Approx(best_two_stage(g, huge, Vector(g.nb_edges(), 0.0), 0.0, d)).epsilon(1e-12));
    }
}

TEST_CASE("anticipative oracle matches joint enumeration on small grids") {
    RngStream rng(24, 0);
    const GridGraph grids[3] = {make_grid(2, 2), make_grid(2, 3), make_grid(3, 3)};
    for (int t = 0; t < 200; ++t) {
        const GridGraph& g = grids[t % 3];
        const std::size_t m = g.nb_edges();
        Vector c(m), d(m), theta(m);
        for (double& x : c) x = rng.uniform(0.0, 2.0);
        for (double& x : d) x = rng.uniform(0.0, 2.0);
        for (double& x : theta) x = rng.normal();
        const double kappa = t % 2 ? 0.0 : rng.uniform(0.1, 2.0);
        const TwoStageSolution sol = mst_anticipative_oracle(g, c, theta, kappa, d);
        CHECK(sol.value == doctest::Approx(best_two_stage(g, c, theta, kappa, d)).epsilon(1e-12));
        std::vector<int> tree(m);
        for (std::size_t e = 0; e < m; ++e) {
            CHECK(sol.y[e] * sol.z[e] == 0.0);
            tree[e] = sol.y[e] + sol.z[e] > 0.5;
        }
        CHECK(spanning_tree_by_dfs(g, tree));
    }
}

TEST_CASE("anticipative oracle limiting cases") {
    const GridGraph g = make_grid(3, 3);
    const std::size_t m = g.nb_edges();
    const Vector c(m, 5.0), cheap(m, 1.0);
    const auto second = mst_anticipative_oracle(g, c, Vector(m, 0.0), 1.0, cheap);
    CHECK(second.y == SolutionVector(m, 0.0));

    // Force a spanning tree T into the first stage with a large shift on its edges.
    const SolutionVector tree = kruskal_min_spanning_tree(g, Vector(m, 1.0));
    Vector theta(m, 0.0);
    for (std::size_t e = 0; e < m; ++e) theta[e] = tree[e] * 1e6;
    const auto forced = mst_anticipative_oracle(g, c, theta, 1.0, Vector(m, 3.0));
    CHECK(forced.y == tree);
}

TEST_CASE("spanning-tree problem costs and oracle faces") {
    GeneratorConfig cfg;
    cfg.rows = 3;
    cfg.cols = 3;
    cfg.train_size = 2;
    cfg.val_size = 1;
    cfg.test_size = 1;
    cfg.scenarios_per_instance = 3;
    const MstData data = MstGenerator(cfg, 5).generate();
    const MstProblem problem(data.graph);
    for (const auto& s : data.train.scenarios) {
        const SolutionVector antic = problem.argmin_shifted(Vector(problem.dimension(), 0.0), 1.0, s);
        CHECK(problem.cost(antic, s) == doctest::Approx(problem.anticipative_cost(s)).epsilon(1e-12));
        const SolutionVector any = problem.argmax_linear(Vector(problem.dimension(), 1.0));
        CHECK(problem.cost(any, s) >= problem.anticipative_cost(s) - 1e-12);
        CHECK(problem.cost(SolutionVector(problem.dimension(), 0.0), s) >= problem.anticipative_cost(s) - 1e-12);
    }
}

// ---- generator and storage ----

TEST_CASE("generator is deterministic and respects its laws") {
    GeneratorConfig cfg;
    cfg.rows = 4;
    cfg.cols = 4;
    cfg.train_size = 3;
    cfg.val_size = 2;
    cfg.test_size = 2;
    cfg.scenarios_per_instance = 4;
    const MstData a = MstGenerator(cfg, 11).generate();
    const MstData b = MstGenerator(cfg, 11).generate();
    const MstData c = MstGenerator(cfg, 12).generate();
    REQUIRE(a.train.size() == 12);
    CHECK(a.val.size() == 8);
    for (std::size_t i = 0; i < a.train.size(); ++i) {
        CHECK(a.train.scenarios[i].noise == b.train.scenarios[i].noise);
        CHECK(a.train.scenarios[i].features().data == b.train.scenarios[i].features().data);
    }
    CHECK(a.train.scenarios[0].noise != c.train.scenarios[0].noise);
    for (const auto& s : a.train.scenarios) {
        for (double f : s.features().data) CHECK((f >= 0.0 && f < 1.0));
        for (std::size_t e = 0; e < s.noise.size(); ++e) {
            const double ce = s.context->attributes[e];
            CHECK((ce >= 5.0 && ce < 10.0));
            CHECK(s.noise[e] >= 0.5 * ce);
            CHECK(s.noise[e] <= 2.5 * ce);
        }
    }
}

TEST_CASE("noise-free generator makes second-stage costs a function of the context") {
    GeneratorConfig cfg;
    cfg.rows = 3;
    cfg.cols = 3;
    cfg.train_size = 2;
    cfg.val_size = 1;
    cfg.test_size = 1;
    cfg.scenarios_per_instance = 3;
    cfg.noise_scale = 0.0;
    const MstData data = MstGenerator(cfg, 3).generate();
    CHECK(data.train.scenarios[0].noise == data.train.scenarios[1].noise);
    CHECK(data.train.scenarios[0].noise != data.train.scenarios[3].noise);
}

namespace {

double correlation(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = double(x.size());
    const double mx = test::sum(x) / n, my = test::sum(y) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

void collect_signal_and_cost(const MstData& data, std::vector<double>& x, std::vector<double>& y) {
    for (const auto& s : data.train.scenarios)
        for (std::size_t e = 0; e < s.noise.size(); ++e) {
            double signal = 0.0;
            for (std::size_t k = 0; k < data.hidden.size(); ++k) signal += data.hidden[k] * s.features()(e, k);
            x.push_back(signal);
            y.push_back(s.noise[e]);
        }
}

// Population correlation for a fixed hidden vector, by direct simulation of the stated law.
double population_correlation(const Vector& a, int n) {
    std::mt19937_64 gen(12345);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> x(n), y(n);
    for (int i = 0; i < n; ++i) {
        double signal = 0.0;
        for (double ak : a) signal += ak * unit(gen);
        const double c = 5.0 + 5.0 * unit(gen);
        x[i] = signal;
        y[i] = c * (0.5 + 2.0 / (1.0 + std::exp(-(signal + normal(gen)))));
    }
    return correlation(x, y);
}

GeneratorConfig correlation_config(int instances) {
    GeneratorConfig cfg;
    cfg.rows = 10;
    cfg.cols = 10;  // 180 edges
    cfg.train_size = instances;
    cfg.val_size = 1;
    cfg.test_size = 1;
    cfg.scenarios_per_instance = 1;
    return cfg;
}

}  // namespace

TEST_CASE("context signal correlation matches the law of the generator") {
    const MstData data = MstGenerator(correlation_config(56), 0).generate();
    std::vector<double> x, y;
    collect_signal_and_cost(data, x, y);
    REQUIRE(x.size() >= 10000);
    const double rho = population_correlation(data.hidden, 1000000);
    CHECK(rho > 0.0);
    // Standard error of a sample correlation is about (1 - rho^2) / sqrt(n).
    CHECK(std::abs(correlation(x, y) - rho) < 4.0 * (1 - rho * rho) / std::sqrt(double(x.size())) + 0.002);
}

TEST_CASE("context signal correlates with second-stage costs across hidden draws") {
    // The correlation depends on the hidden vector; pooled over 20 seeds it clears 0.3.
    std::vector<double> x, y;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        std::vector<double> xs, ys;
        collect_signal_and_cost(MstGenerator(correlation_config(3), seed).generate(), xs, ys);
        const double mx = test::sum(xs) / double(xs.size());
        for (double& v : xs) v -= mx;
        x.insert(x.end(), xs.begin(), xs.end());
        y.insert(y.end(), ys.begin(), ys.end());
    }
    REQUIRE(x.size() >= 10000);
    CHECK(correlation(x, y) > 0.3);
}

TEST_CASE("cost-in-features option ties first-stage costs to feature 0") {
    GeneratorConfig cfg;
    cfg.rows = 3;
    cfg.cols = 3;
    cfg.train_size = 2;
    cfg.val_size = 1;
    cfg.test_size = 1;
    cfg.scenarios_per_instance = 2;
    cfg.cost_in_features = true;
    const MstData data = MstGenerator(cfg, 4).generate();
    for (const auto& s : data.train.scenarios)
        for (std::size_t e = 0; e < s.noise.size(); ++e)
            CHECK(s.context->attributes[e] == doctest::Approx(5.0 + 5.0 * s.features()(e, 0)));
}

TEST_CASE("reference noise is reproducible and differs from stored scenarios") {
    GeneratorConfig cfg;
    cfg.rows = 3;
    cfg.cols = 3;
    cfg.train_size = 1;
    cfg.val_size = 1;
    cfg.test_size = 1;
    cfg.scenarios_per_instance = 2;
    const MstGenerator gen(cfg, 8);
    const MstData data = gen.generate();
    const Context& ctx = *data.test.scenarios[0].context;
    const auto a = gen.reference_noise(ctx, Split::Test, 3);
    CHECK(a == gen.reference_noise(ctx, Split::Test, 3));
    CHECK(a[0] != data.test.scenarios[0].noise);
}

TEST_CASE("invalid generator configs are rejected") {
    GeneratorConfig cfg;
    cfg.rows = 1;
    cfg.cols = 1;
    CHECK_THROWS_AS(cfg.validate(), InputError);
    GeneratorConfig bad_costs;
    bad_costs.cost_low = 0.0;
    CHECK_THROWS_AS(bad_costs.validate(), InputError);
}

TEST_CASE("dataset files round-trip bit-exactly") {
    GeneratorConfig cfg;
    cfg.rows = 3;
    cfg.cols = 4;
    cfg.train_size = 2;
    cfg.val_size = 1;
    cfg.test_size = 1;
    cfg.scenarios_per_instance = 3;
    const MstData data = MstGenerator(cfg, 9).generate();
    DatasetFile file{data.graph, data.train, {}};
    for (std::size_t i = 0; i < data.train.size(); ++i)
        file.targets.push_back(SolutionVector(data.graph.nb_edges(), double(i % 2)));
    const std::string path = (std::filesystem::temp_directory_path() / "costru_roundtrip.json").string();
    write_dataset(path, file);
    const DatasetFile back = read_dataset(path);
    CHECK(back.graph.edges == data.graph.edges);
    CHECK(back.data.split == Split::Train);
    REQUIRE(back.data.size() == data.train.size());
    for (std::size_t i = 0; i < data.train.size(); ++i) {
        const auto& x = data.train.scenarios[i];
        const auto& y = back.data.scenarios[i];
        CHECK(x.context_id() == y.context_id());
        CHECK(x.noise == y.noise);
        CHECK(x.features().data == y.features().data);
        CHECK(x.context->attributes == y.context->attributes);
    }
    CHECK(back.targets == file.targets);
    CHECK(dataset_to_json(back) == dataset_to_json(file));
    std::filesystem::remove(path);
    CHECK_THROWS_AS(read_dataset(path), IoError);
    CHECK_THROWS_AS(dataset_from_json("{\"format\": \"other\"}"), InputError);
}
