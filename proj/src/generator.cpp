#include "costru/generator.hpp"

#include <cmath>

namespace costru {

void GeneratorConfig::validate() const {
    if (rows < 1 || cols < 1 || rows * cols < 2) throw InputError("grid needs at least two nodes");
    if (train_size < 1 || val_size < 1 || test_size < 1) throw InputError("split sizes must be >= 1");
    if (scenarios_per_instance < 1) throw InputError("scenarios_per_instance must be >= 1");
    if (nb_features < 1) throw InputError("nb_features must be >= 1");
    if (!(noise_scale >= 0.0)) throw InputError("noise_scale must be >= 0");
    if (!(cost_low > 0.0) || !(cost_high >= cost_low)) throw InputError("cost range must satisfy 0 < low <= high");
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

namespace {

std::uint64_t split_code(Split split) { return static_cast<std::uint64_t>(split) + 1; }

}  // namespace

MstGenerator::MstGenerator(GeneratorConfig config, std::uint64_t seed)
    : config_(config), seed_(seed), graph_(make_grid(config.rows, config.cols)) {
    config_.validate();
    RngStream rng = make_rng(seed_, stream_key(StreamPurpose::Generator, 0, 0));
    hidden_.resize(static_cast<std::size_t>(config_.nb_features));
    for (double& a : hidden_) a = rng.normal();
}

Vector MstGenerator::sample_noise(const Context& context, RngStream& rng) const {
    const std::size_t m = graph_.nb_edges();
    Vector d(m);
    for (std::size_t e = 0; e < m; ++e) {
        double signal = 0.0;
        for (std::size_t k = 0; k < hidden_.size(); ++k) signal += hidden_[k] * context.features(e, k);
        const double zeta = rng.normal();
        d[e] = context.attributes[e] * (0.5 + 2.0 * sigmoid(signal + config_.noise_scale * zeta));
    }
    return d;
}

Dataset MstGenerator::make_split(Split split, int size) const {
    Dataset data;
    data.split = split;
    const std::size_t m = graph_.nb_edges();
    const auto p = static_cast<std::size_t>(config_.nb_features);
    for (int i = 0; i < size; ++i) {
        RngStream rng = make_rng(seed_, stream_key(StreamPurpose::Generator, split_code(split), i + 1));
        auto context = std::make_shared<Context>();
        context->id = i;
        context->features = Matrix(m, p);
        for (double& f : context->features.data) f = rng.uniform();
        context->attributes.resize(m);
        for (std::size_t e = 0; e < m; ++e) {
            const double u = rng.uniform();
            context->attributes[e] = config_.cost_in_features
                                         ? config_.cost_low + (config_.cost_high - config_.cost_low) * context->features(e, 0)
                                         : config_.cost_low + (config_.cost_high - config_.cost_low) * u;
        }
        for (int k = 0; k < config_.scenarios_per_instance; ++k) {
            RngStream noise_rng = rng.derive(static_cast<std::uint64_t>(k));
            data.scenarios.push_back({context, sample_noise(*context, noise_rng)});
        }
    }
    return data;
}

MstData MstGenerator::generate() const {
    return MstData{graph_, hidden_, make_split(Split::Train, config_.train_size),
                   make_split(Split::Val, config_.val_size), make_split(Split::Test, config_.test_size)};
}

std::vector<Vector> MstGenerator::reference_noise(const Context& context, Split split, int count) const {
    RngStream rng = make_rng(seed_, stream_key(StreamPurpose::Reference, split_code(split),
                                               static_cast<std::uint64_t>(context.id)));
    std::vector<Vector> out;
    for (int k = 0; k < count; ++k) out.push_back(sample_noise(context, rng));
    return out;
}

}  // namespace costru
