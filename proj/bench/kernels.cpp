// Serial reference vs OpenMP kernels. Results are bit-identical; only time differs.
// Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "costru/generator.hpp"
#include "costru/regularizers.hpp"
#include "costru/trainer.hpp"

using namespace costru;

namespace {

struct Fixture {
    MstData data;
    MstProblem problem;
    GlmWeights weights;
    std::vector<std::size_t> batch;

    Fixture() : data(make()), problem(data.graph), weights{{0.3, -0.2, 0.1, 0.4, -0.1}} {
        for (std::size_t k = 0; k < data.train.size(); ++k) batch.push_back(k);
    }

    static MstData make() {
        GeneratorConfig cfg;
        cfg.rows = 6;
        cfg.cols = 6;
        cfg.train_size = 20;
        cfg.val_size = 20;
        cfg.test_size = 20;
        cfg.scenarios_per_instance = 10;
        return MstGenerator(cfg, 0).generate();
    }
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

TrainConfig bench_config() {
    TrainConfig c = TrainConfig::mst_defaults();
    c.epsilon = 1.0;
    return c;
}

template <bool Parallel>
void moment(benchmark::State& state) {
    const Fixture& f = fixture();
    const ScoreDirection theta = score_instance(f.weights, f.data.train.scenarios[0]);
    const int m = static_cast<int>(state.range(0));
    for (auto _ : state) {
        RngStream rng(1, 0);
        benchmark::DoNotOptimize(Parallel ? perturbed_maximizer_moment(f.problem, theta, 1.0, m, rng)
                                          : serial::perturbed_maximizer_moment(f.problem, theta, 1.0, m, rng));
    }
}

template <bool Parallel>
void decomposition(benchmark::State& state) {
    const Fixture& f = fixture();
    const TrainConfig cfg = bench_config();
    for (auto _ : state)
        benchmark::DoNotOptimize(Parallel ? decomposition_pass(f.weights, f.data.train, f.batch, f.problem, cfg, 0)
                                          : serial::decomposition_pass(f.weights, f.data.train, f.batch, f.problem, cfg, 0));
}

template <bool Parallel>
void evaluation(benchmark::State& state) {
    const Fixture& f = fixture();
    for (auto _ : state)
        benchmark::DoNotOptimize(Parallel ? evaluate_policy(f.weights, f.data.test, f.problem, f.problem)
                                          : serial::evaluate_policy(f.weights, f.data.test, f.problem, f.problem));
}

}  // namespace

BENCHMARK(moment<false>)->Name("perturbed_moment/serial")->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(moment<true>)->Name("perturbed_moment/parallel")->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(decomposition<false>)->Name("decomposition_pass/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(decomposition<true>)->Name("decomposition_pass/parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(evaluation<false>)->Name("evaluate_policy/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(evaluation<true>)->Name("evaluate_policy/parallel")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
