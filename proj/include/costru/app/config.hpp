#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "costru/baselines.hpp"
#include "costru/generator.hpp"
#include "costru/simplex_lab.hpp"
#include "costru/trainer.hpp"

namespace costru::app {

enum class ProblemKind { Toy, Mst };

std::string to_string(ProblemKind kind);
ProblemKind problem_from_string(const std::string& name);

/// Sizes of the theorem-check suites.
struct VerifySettings {
    int instances = 20;
    int probes = 1000;
    int trials = 1000;
    int risk_instances = 100;
    int forest_draws = 500;
    int grid_draws = 200;
    int gradient_samples = 100000;
    int lab_iterations = 200;
    int long_run = 10000;
};

struct SweepSettings {
    std::vector<double> epsilons{1.0, 2.0, 2.5, 3.0, 4.0, 5.0, 10.0, 50.0, 150.0};
    int nb_seeds = 30;
};

/// Fully resolved run configuration. Training defaults follow the problem kind:
/// the toy table for `toy`, the spanning-tree table for `mst`.
struct RunConfig {
    ProblemKind problem = ProblemKind::Mst;
    std::uint64_t seed = 0;
    GeneratorConfig generator;
    TrainConfig train = TrainConfig::mst_defaults();
    SaaConfig saa;
    LabConfig lab;
    int toy_train_size = 3;
    int median_samples = 20;
    VerifySettings verify;
    SweepSettings sweep;

    void validate() const;
    /// One `section.key=value` line per field, fixed order, doubles in round-trip form.
    std::string canonical() const;
    std::uint64_t hash() const;
    /// Propagates `seed` into the training config.
    void set_seed(std::uint64_t value);
};

RunConfig default_config(ProblemKind problem);

/// INI text with sections run, generator, train, saa, lab, toy, median, verify, sweep.
/// Unknown sections or keys and unparsable values throw InputError.
RunConfig parse_config(const std::string& text);

/// Empty path yields the spanning-tree defaults. Unreadable file throws IoError.
RunConfig load_config(const std::string& path);

std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace costru::app
