#include "costru/app/config.hpp"

#include <fmt/format.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <functional>
#include <map>
#include <sstream>

#include "costru/dataset_io.hpp"

namespace costru::app {

std::string to_string(ProblemKind kind) { return kind == ProblemKind::Toy ? "toy" : "mst"; }

ProblemKind problem_from_string(const std::string& name) {
    if (name == "toy") return ProblemKind::Toy;
    if (name == "mst") return ProblemKind::Mst;
    throw InputError("unknown problem '" + name + "' (expected toy or mst)");
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

namespace {

double parse_double(const std::string& key, const std::string& text) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) throw InputError("config key " + key + ": not a number: '" + text + "'");
    return value;
}

long long parse_integer(const std::string& key, const std::string& text) {
    long long value = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) throw InputError("config key " + key + ": not an integer: '" + text + "'");
    return value;
}

int parse_int(const std::string& key, const std::string& text) {
    const long long v = parse_integer(key, text);
    if (v < -2147483647LL || v > 2147483647LL) throw InputError("config key " + key + ": out of range");
    return static_cast<int>(v);
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw InputError("config key " + key + ": expected true or false, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        const auto first = item.find_first_not_of(" \t");
        const auto last = item.find_last_not_of(" \t");
        if (first == std::string::npos) throw InputError("config key " + key + ": empty list entry");
        out.push_back(parse_double(key, item.substr(first, last - first + 1)));
    }
    if (out.empty()) throw InputError("config key " + key + ": empty list");
    return out;
}

std::string fmt_list(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + fmt::format("{}", values[i]);
    return out;
}

/// Getter and setter for every key, in canonical order. The single table keeps
/// parsing, canonical dumps and the unknown-key check in agreement.
struct Field {
    std::string name;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&)> set;
};

template <typename T>
std::string show(const T& v) {
    return fmt::format("{}", v);
}

const std::vector<Field>& fields() {
    static const std::vector<Field> table = [] {
        std::vector<Field> f;
        auto num = [&f](std::string name, auto member) {
            f.push_back({name,
                         [member](const RunConfig& c) { return show(member(const_cast<RunConfig&>(c))); },
                         [member, name](RunConfig& c, const std::string& v) {
                             auto& slot = member(c);
                             using Slot = std::remove_reference_t<decltype(slot)>;
                             if constexpr (std::is_same_v<Slot, double>) slot = parse_double(name, v);
                             else if constexpr (std::is_same_v<Slot, bool>) slot = parse_bool(name, v);
                             else if constexpr (std::is_same_v<Slot, std::size_t>) {
                                 const long long x = parse_integer(name, v);
                                 if (x < 0) throw InputError("config key " + name + ": must be >= 0");
                                 slot = static_cast<std::size_t>(x);
                             } else if constexpr (std::is_same_v<Slot, std::uint64_t>) {
                                 const long long x = parse_integer(name, v);
                                 if (x < 0) throw InputError("config key " + name + ": must be >= 0");
                                 slot = static_cast<std::uint64_t>(x);
                             } else slot = parse_int(name, v);
                         }});
        };
        f.push_back({"run.problem", [](const RunConfig& c) { return to_string(c.problem); },
                     [](RunConfig& c, const std::string& v) { c.problem = problem_from_string(v); }});
        num("run.seed", [](RunConfig& c) -> std::uint64_t& { return c.seed; });

        num("generator.rows", [](RunConfig& c) -> std::size_t& { return c.generator.rows; });
        num("generator.cols", [](RunConfig& c) -> std::size_t& { return c.generator.cols; });
        num("generator.train_size", [](RunConfig& c) -> int& { return c.generator.train_size; });
        num("generator.val_size", [](RunConfig& c) -> int& { return c.generator.val_size; });
        num("generator.test_size", [](RunConfig& c) -> int& { return c.generator.test_size; });
        num("generator.scenarios_per_instance", [](RunConfig& c) -> int& { return c.generator.scenarios_per_instance; });
        num("generator.nb_features", [](RunConfig& c) -> int& { return c.generator.nb_features; });
        num("generator.noise_scale", [](RunConfig& c) -> double& { return c.generator.noise_scale; });
        num("generator.cost_low", [](RunConfig& c) -> double& { return c.generator.cost_low; });
        num("generator.cost_high", [](RunConfig& c) -> double& { return c.generator.cost_high; });
        num("generator.cost_in_features", [](RunConfig& c) -> bool& { return c.generator.cost_in_features; });

        num("train.nb_iterations", [](RunConfig& c) -> int& { return c.train.nb_iterations; });
        num("train.nb_scenarios", [](RunConfig& c) -> int& { return c.train.nb_scenarios; });
        num("train.nb_samples", [](RunConfig& c) -> int& { return c.train.nb_samples; });
        num("train.nb_epochs", [](RunConfig& c) -> int& { return c.train.nb_epochs; });
        num("train.lr_init", [](RunConfig& c) -> double& { return c.train.lr_init; });
        num("train.epsilon", [](RunConfig& c) -> double& { return c.train.epsilon; });
        num("train.kappa", [](RunConfig& c) -> double& { return c.train.kappa; });
        num("train.exact_decomposition", [](RunConfig& c) -> bool& { return c.train.exact_decomposition; });

        num("saa.n_saa_scenarios", [](RunConfig& c) -> int& { return c.saa.n_saa_scenarios; });
        num("saa.lagrangian_iters", [](RunConfig& c) -> int& { return c.saa.lagrangian_iters; });
        num("saa.sigma0", [](RunConfig& c) -> double& { return c.saa.sigma0; });

        num("lab.kappa", [](RunConfig& c) -> double& { return c.lab.kappa; });
        f.push_back({"lab.regularizer", [](const RunConfig& c) { return costru::to_string(c.lab.regularizer); },
                     [](RunConfig& c, const std::string& v) { c.lab.regularizer = reg_tag_from_string(v); }});
        num("lab.max_iters", [](RunConfig& c) -> int& { return c.lab.max_iters; });
        num("lab.damping_alpha", [](RunConfig& c) -> double& { return c.lab.damping_alpha; });

        num("toy.train_size", [](RunConfig& c) -> int& { return c.toy_train_size; });
        num("median.reference_samples", [](RunConfig& c) -> int& { return c.median_samples; });

        num("verify.instances", [](RunConfig& c) -> int& { return c.verify.instances; });
        num("verify.probes", [](RunConfig& c) -> int& { return c.verify.probes; });
        num("verify.trials", [](RunConfig& c) -> int& { return c.verify.trials; });
        num("verify.risk_instances", [](RunConfig& c) -> int& { return c.verify.risk_instances; });
        num("verify.forest_draws", [](RunConfig& c) -> int& { return c.verify.forest_draws; });
        num("verify.grid_draws", [](RunConfig& c) -> int& { return c.verify.grid_draws; });
        num("verify.gradient_samples", [](RunConfig& c) -> int& { return c.verify.gradient_samples; });
        num("verify.lab_iterations", [](RunConfig& c) -> int& { return c.verify.lab_iterations; });
        num("verify.long_run", [](RunConfig& c) -> int& { return c.verify.long_run; });

        f.push_back({"sweep.epsilons", [](const RunConfig& c) { return fmt_list(c.sweep.epsilons); },
                     [](RunConfig& c, const std::string& v) { c.sweep.epsilons = parse_list("sweep.epsilons", v); }});
        num("sweep.nb_seeds", [](RunConfig& c) -> int& { return c.sweep.nb_seeds; });
        return f;
    }();
    return table;
}

}  // namespace

RunConfig default_config(ProblemKind problem) {
    RunConfig c;
    c.problem = problem;
    c.train = problem == ProblemKind::Toy ? TrainConfig::toy_defaults() : TrainConfig::mst_defaults();
    return c;
}

void RunConfig::set_seed(std::uint64_t value) {
    seed = value;
    train.seed = value;
}

void RunConfig::validate() const {
    generator.validate();
    train.validate();
    saa.validate();
    lab.validate();
    if (toy_train_size < 1) throw InputError("toy.train_size must be >= 1");
    if (median_samples < 1) throw InputError("median.reference_samples must be >= 1");
    const VerifySettings& v = verify;
    for (int n : {v.instances, v.probes, v.trials, v.risk_instances, v.forest_draws, v.grid_draws,
                  v.gradient_samples, v.lab_iterations})
        if (n < 1) throw InputError("verify sizes must be >= 1");
    if (v.long_run < v.lab_iterations) throw InputError("verify.long_run must be >= verify.lab_iterations");
    if (sweep.nb_seeds < 1) throw InputError("sweep.nb_seeds must be >= 1");
    for (double eps : sweep.epsilons)
        if (!(eps > 0.0)) throw InputError("sweep epsilons must be > 0");
}

std::string RunConfig::canonical() const {
    std::string out;
    for (const Field& f : fields()) out += f.name + "=" + f.get(*this) + "\n";
    return out;
}

std::uint64_t RunConfig::hash() const { return fnv1a64(canonical()); }

RunConfig parse_config(const std::string& text) {
    boost::property_tree::ptree tree;
    try {
        std::istringstream stream(text);
        boost::property_tree::ini_parser::read_ini(stream, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw InputError(std::string("config: ") + e.what());
    }

    std::map<std::string, std::string> values;
    for (const auto& [section, body] : tree) {
        if (body.empty()) throw InputError("config: key '" + section + "' outside any section");
        for (const auto& [key, leaf] : body) values[section + "." + key] = leaf.get_value<std::string>();
    }
    std::map<std::string, const Field*> known;
    for (const Field& f : fields()) known[f.name] = &f;
    for (const auto& [name, value] : values)
        if (!known.count(name)) throw InputError("config: unknown key '" + name + "'");

    const auto problem_it = values.find("run.problem");
    RunConfig config = default_config(problem_it == values.end() ? ProblemKind::Mst
                                                                 : problem_from_string(problem_it->second));
    for (const auto& [name, value] : values) known[name]->set(config, value);
    config.set_seed(config.seed);
    config.validate();
    return config;
}

RunConfig load_config(const std::string& path) {
    if (path.empty()) {
        RunConfig config = default_config(ProblemKind::Mst);
        config.validate();
        return config;
    }
    return parse_config(read_text_file(path));
}

}  // namespace costru::app
