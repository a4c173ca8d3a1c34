#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "costru/mst.hpp"
#include "costru/rng.hpp"

namespace costru {

struct GeneratorConfig {
    std::size_t rows = 20;
    std::size_t cols = 20;
    int train_size = 50;
    int val_size = 50;
    int test_size = 50;
    int scenarios_per_instance = 20;
    int nb_features = 5;
    double noise_scale = 1.0;  // b
    double cost_low = 5.0;
    double cost_high = 10.0;
    /// When set, c_e = lo + (hi - lo) phi_e0, so the first feature reveals the first-stage cost.
    bool cost_in_features = false;

    void validate() const;
};

struct MstData {
    GridGraph graph;
    Vector hidden;  // a
    Dataset train;
    Dataset val;
    Dataset test;
};

/// Contexts: features iid U[0,1]^p per edge, first-stage costs c_e ~ U[lo, hi].
/// Noise: d_e = c_e (0.5 + 2 sigmoid(<a|phi_e> + b zeta_e)), zeta iid N(0,1).
/// Hidden a ~ N(0, I_p), drawn once from the seed.
class MstGenerator {
public:
    MstGenerator(GeneratorConfig config, std::uint64_t seed);

    const GeneratorConfig& config() const { return config_; }
    const GridGraph& graph() const { return graph_; }
    const Vector& hidden() const { return hidden_; }
    std::uint64_t seed() const { return seed_; }

    MstData generate() const;

    /// Fresh noise draws for a context, independent of the stored scenarios.
    std::vector<Vector> reference_noise(const Context& context, Split split, int count) const;

    Vector sample_noise(const Context& context, RngStream& rng) const;

private:
    Dataset make_split(Split split, int size) const;

    GeneratorConfig config_;
    std::uint64_t seed_;
    GridGraph graph_;
    Vector hidden_;
};

double sigmoid(double x);

}  // namespace costru
