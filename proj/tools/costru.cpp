#include <CLI11.hpp>
#include <omp.h>
#include <spdlog/spdlog.h>

#include <iostream>

#include "costru/app/commands.hpp"
#include "costru/app/log.hpp"

using namespace costru;
using namespace costru::app;

namespace {

struct Common {
    std::string config_path;
    std::string out_dir = "out";
    long long seed = -1;
    int workers = 0;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config_path, "INI configuration file");
    cmd->add_option("--seed", c.seed, "Override run.seed")->check(CLI::NonNegativeNumber);
    cmd->add_option("--workers", c.workers, "Worker threads (0 = logical cores)")->check(CLI::NonNegativeNumber);
    cmd->add_option("--out", c.out_dir, "Output directory");
}

RunConfig resolve(const Common& c) {
    RunConfig config = load_config(c.config_path);
    if (c.seed >= 0) config.set_seed(static_cast<std::uint64_t>(c.seed));
    if (c.workers > 0) omp_set_num_threads(c.workers);
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    init_logging();
    CLI::App app{"Primal-dual training of combinatorial policies for contextual stochastic optimization"};
    app.require_subcommand(1);

    Common common;
    std::string method, data_dir, suite, weights_path;

    auto* generate = app.add_subcommand("generate", "Write dataset splits and a manifest");
    add_common(generate, common);

    auto* train = app.add_subcommand("train", "Train one policy on a generated dataset");
    add_common(train, common);
    train->add_option("method", method, "primal-dual | uncoordinated | fully-coordinated | median")
        ->required()
        ->check(CLI::IsMember({"primal-dual", "uncoordinated", "fully-coordinated", "median"}));
    train->add_option("--data", data_dir, "Dataset directory from `generate`")->required();

    auto* verify = app.add_subcommand("verify", "Run a theorem-check suite; exit 1 on any violation");
    add_common(verify, common);
    verify->add_option("suite", suite, "Suite name")->required()->check(CLI::IsMember(verify_suites()));

    auto* sweep = app.add_subcommand("sweep-epsilon", "Toy proportion of optimal outcomes per epsilon");
    add_common(sweep, common);

    auto* evaluate = app.add_subcommand("evaluate", "Score saved weights on the val and test splits");
    add_common(evaluate, common);
    evaluate->add_option("--weights", weights_path, "weights.csv from `train`")->required();
    evaluate->add_option("--data", data_dir, "Dataset directory from `generate`")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        const RunConfig config = resolve(common);
        if (*generate) {
            cmd_generate(config, common.out_dir);
        } else if (*train) {
            cmd_train(config, method, data_dir, common.out_dir);
        } else if (*verify) {
            const VerifyOutcome outcome = cmd_verify(config, suite, common.out_dir);
            std::cout << suite << ": " << (outcome.passed() ? "PASS" : "FAIL") << " (" << outcome.failures()
                      << " of " << outcome.rows.size() << " checks failed)\n";
            if (!outcome.passed()) return kExitVerifyFailed;
        } else if (*sweep) {
            for (const auto& p : cmd_sweep_epsilon(config, common.out_dir))
                std::cout << "epsilon " << p.epsilon << ": " << p.proportion() << "\n";
        } else if (*evaluate) {
            cmd_evaluate(config, weights_path, data_dir, common.out_dir);
        }
    } catch (const IoError& e) {
        spdlog::error("{}", e.what());
        return kExitIo;
    } catch (const InfeasibleError& e) {
        spdlog::error("{}", e.what());
        return kExitUsage;
    } catch (const InputError& e) {
        spdlog::error("{}", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return kExitVerifyFailed;
    }
    return kExitOk;
}
