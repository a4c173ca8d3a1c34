#pragma once

#include <string>
#include <vector>

#include "costru/app/config.hpp"
#include "costru/app/verify.hpp"

namespace costru::app {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitVerifyFailed = 1, kExitUsage = 2, kExitIo = 3 };

/// Writes manifest.json and, for mst, train/val/test.json. Returns the written paths.
std::vector<std::string> cmd_generate(const RunConfig& config, const std::string& out_dir);

/// method: primal-dual, uncoordinated, fully-coordinated or median. Reads the
/// manifest (and split files) under data_dir. Writes metrics.csv, weights.csv or
/// solutions.csv, and timing.csv for primal-dual. Wall time lives only in
/// timing.csv so every other file is byte-deterministic.
std::vector<std::string> cmd_train(const RunConfig& config, const std::string& method, const std::string& data_dir,
                                   const std::string& out_dir);

/// Writes verify_<suite>.csv.
VerifyOutcome cmd_verify(const RunConfig& config, const std::string& suite, const std::string& out_dir);

struct SweepPoint {
    double epsilon = 0.0;
    int optimal = 0;
    int seeds = 0;
    double proportion() const { return seeds ? static_cast<double>(optimal) / seeds : 0.0; }
};

/// Toy primal-dual for seeds seed, ..., seed + nb_seeds - 1 at one epsilon; counts
/// runs whose averaged theta selects y = 1.
SweepPoint toy_sweep_point(const RunConfig& config, double epsilon, int nb_seeds);

/// Writes sweep_epsilon.csv with one row per configured epsilon.
std::vector<SweepPoint> cmd_sweep_epsilon(const RunConfig& config, const std::string& out_dir);

/// Scores the final averaged weights of weights.csv (last row if no average rows)
/// on the val and test splits; writes evaluation.csv.
std::vector<std::string> cmd_evaluate(const RunConfig& config, const std::string& weights_path,
                                      const std::string& data_dir, const std::string& out_dir);

}  // namespace costru::app
