#include "costru/app/commands.hpp"

#include <chrono>
#include <filesystem>
#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "costru/app/csv.hpp"
#include "costru/baselines.hpp"
#include "costru/dataset_io.hpp"
#include "costru/generator.hpp"
#include "costru/toy.hpp"

namespace costru::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

CsvWriter csv(const RunConfig& config, std::vector<std::string> header) {
    return CsvWriter(config.hash(), config.seed, std::move(header));
}

json generator_json(const GeneratorConfig& g) {
    return json{{"rows", g.rows},
                {"cols", g.cols},
                {"train_size", g.train_size},
                {"val_size", g.val_size},
                {"test_size", g.test_size},
                {"scenarios_per_instance", g.scenarios_per_instance},
                {"nb_features", g.nb_features},
                {"noise_scale", g.noise_scale},
                {"cost_low", g.cost_low},
                {"cost_high", g.cost_high},
                {"cost_in_features", g.cost_in_features}};
}

GeneratorConfig generator_from_json(const json& j) {
    GeneratorConfig g;
    g.rows = j.at("rows").get<std::size_t>();
    g.cols = j.at("cols").get<std::size_t>();
    g.train_size = j.at("train_size").get<int>();
    g.val_size = j.at("val_size").get<int>();
    g.test_size = j.at("test_size").get<int>();
    g.scenarios_per_instance = j.at("scenarios_per_instance").get<int>();
    g.nb_features = j.at("nb_features").get<int>();
    g.noise_scale = j.at("noise_scale").get<double>();
    g.cost_low = j.at("cost_low").get<double>();
    g.cost_high = j.at("cost_high").get<double>();
    g.cost_in_features = j.at("cost_in_features").get<bool>();
    g.validate();
    return g;
}

struct Manifest {
    ProblemKind problem = ProblemKind::Mst;
    std::uint64_t seed = 0;
    GeneratorConfig generator;
};

Manifest read_manifest(const std::string& data_dir) {
    const std::string text = read_text_file(join(data_dir, "manifest.json"));
    try {
        const json j = json::parse(text);
        if (j.at("format") != "costru-manifest") throw InputError("not a costru manifest");
        Manifest m;
        m.problem = problem_from_string(j.at("problem").get<std::string>());
        m.seed = j.at("seed").get<std::uint64_t>();
        if (m.problem == ProblemKind::Mst) m.generator = generator_from_json(j.at("generator"));
        return m;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed manifest: ") + e.what());
    }
}

/// Splits of one problem, ready for training and evaluation.
struct Workspace {
    ProblemKind kind = ProblemKind::Mst;
    std::unique_ptr<Problem> problem;
    GridGraph graph;
    Dataset train, val, test;
    std::unique_ptr<MstGenerator> generator;  // mst only, for median reference draws
};

Workspace open_workspace(const RunConfig& config, const std::string& data_dir) {
    const Manifest manifest = read_manifest(data_dir);
    if (manifest.problem != config.problem)
        throw InputError("dataset holds a " + to_string(manifest.problem) + " problem but the config selects " +
                         to_string(config.problem));
    Workspace ws;
    ws.kind = manifest.problem;
    if (ws.kind == ProblemKind::Toy) {
        ws.problem = std::make_unique<TabularProblem>(make_toy_problem());
        ws.train = make_toy_dataset(config.toy_train_size, Split::Train);
        ws.val = make_toy_dataset(3, Split::Val);
        ws.test = make_toy_dataset(3, Split::Test);
        return ws;
    }
    DatasetFile train = read_dataset(join(data_dir, "train.json"));
    DatasetFile val = read_dataset(join(data_dir, "val.json"));
    DatasetFile test = read_dataset(join(data_dir, "test.json"));
    ws.graph = train.graph;
    ws.problem = std::make_unique<MstProblem>(train.graph);
    ws.train = std::move(train.data);
    ws.val = std::move(val.data);
    ws.test = std::move(test.data);
    ws.generator = std::make_unique<MstGenerator>(manifest.generator, manifest.seed);
    return ws;
}

std::vector<std::string> weight_header(std::size_t p) {
    std::vector<std::string> h{"iteration", "kind"};
    for (std::size_t k = 0; k < p; ++k) h.push_back("w" + std::to_string(k));
    return h;
}

std::vector<CsvCell> weight_row(long long iteration, const std::string& kind, const Vector& w) {
    std::vector<CsvCell> row{iteration, kind};
    for (double x : w) row.emplace_back(x);
    return row;
}

std::vector<SolutionVector> median_decisions(const Workspace& ws, const RunConfig& config, const Dataset& data) {
    std::vector<SolutionVector> out;
    out.reserve(data.size());
    if (ws.kind == ProblemKind::Toy) {
        const auto& toy = static_cast<const TabularProblem&>(*ws.problem);
        std::vector<std::size_t> columns;
        for (const auto& s : ws.train.scenarios) columns.push_back(static_cast<std::size_t>(s.noise.at(0)));
        const SolutionVector y = tabular_median_solution(toy, columns);
        out.assign(data.size(), y);
        return out;
    }
    int last_context = -1;
    SolutionVector y;
    for (const auto& s : data.scenarios) {
        if (s.context_id() != last_context) {
            last_context = s.context_id();
            y = median_policy_solution(ws.graph, *s.context,
                                       ws.generator->reference_noise(*s.context, data.split, config.median_samples));
        }
        out.push_back(y);
    }
    return out;
}

std::string solution_cell(const SolutionVector& y) {
    std::string out;
    for (std::size_t e = 0; e < y.size(); ++e)
        if (y[e] > 0.5) out += (out.empty() ? "" : " ") + std::to_string(e);
    return out;
}

}  // namespace

std::vector<std::string> cmd_generate(const RunConfig& config, const std::string& out_dir) {
    config.validate();
    ensure_dir(out_dir);
    std::vector<std::string> files;
    json manifest{{"format", "costru-manifest"},
                  {"version", 1},
                  {"problem", to_string(config.problem)},
                  {"seed", config.seed},
                  {"config_hash", fmt::format("{:016x}", config.hash())}};
    if (config.problem == ProblemKind::Mst) {
        const MstGenerator gen(config.generator, config.seed);
        const MstData data = gen.generate();
        json names = json::array();
        for (const auto* split : {&data.train, &data.val, &data.test}) {
            const std::string name = to_string(split->split) + ".json";
            const std::string path = join(out_dir, name);
            write_dataset(path, DatasetFile{data.graph, *split, {}});
            files.push_back(path);
            names.push_back(name);
        }
        manifest["generator"] = generator_json(config.generator);
        manifest["hidden"] = data.hidden;
        manifest["files"] = names;
    } else {
        const TabularProblem toy = make_toy_problem();
        json table = json::array();
        for (std::size_t v = 0; v < toy.vertices().size(); ++v) {
            json row = json::array();
            for (std::size_t c = 0; c < toy.nb_columns(); ++c) row.push_back(toy.table(v, c));
            table.push_back(row);
        }
        manifest["vertices"] = toy.vertices();
        manifest["costs"] = table;
        manifest["files"] = json::array();
    }
    const std::string path = join(out_dir, "manifest.json");
    write_text_file(path, manifest.dump(2) + "\n");
    files.push_back(path);
    spdlog::info("generate: wrote {} files to {}", files.size(), out_dir);
    return files;
}

std::vector<std::string> cmd_train(const RunConfig& config, const std::string& method, const std::string& data_dir,
                                   const std::string& out_dir) {
    config.validate();
    if (method != "primal-dual" && method != "uncoordinated" && method != "fully-coordinated" && method != "median")
        throw InputError("unknown method '" + method + "'");
    const Workspace ws = open_workspace(config, data_dir);
    ensure_dir(out_dir);
    const Problem& problem = *ws.problem;
    const std::size_t p = ws.train.scenarios.front().features().cols;
    std::vector<std::string> files;
    auto emit = [&](const CsvWriter& w, const std::string& name) {
        const std::string path = join(out_dir, name);
        w.write(path);
        files.push_back(path);
    };

    if (method == "primal-dual") {
        CsvWriter metrics = csv(config, {"iteration", "val_gap_current_w", "val_gap_avg_w", "test_gap_current_w",
                                         "test_gap_avg_w"});
        CsvWriter timing = csv(config, {"iteration", "wall_time_ms"});
        CsvWriter weights = csv(config, weight_header(p));
        const auto start = std::chrono::steady_clock::now();
        train_primal_dual(ws.train, problem, config.train, [&](int t, const Vector& current, const Vector& average) {
            const double elapsed =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
            const long long it = t + 1;
            metrics.row({it, evaluate_policy({current}, ws.val, problem, problem).mean_gap,
                         evaluate_policy({average}, ws.val, problem, problem).mean_gap,
                         evaluate_policy({current}, ws.test, problem, problem).mean_gap,
                         evaluate_policy({average}, ws.test, problem, problem).mean_gap});
            timing.row({it, elapsed});
            weights.row(weight_row(it, "current", current));
            weights.row(weight_row(it, "average", average));
            spdlog::debug("primal-dual iteration {} done ({:.0f} ms)", it, elapsed);
        });
        emit(metrics, "metrics.csv");
        emit(timing, "timing.csv");
        emit(weights, "weights.csv");
        return files;
    }

    CsvWriter metrics = csv(config, {"method", "val_cost", "val_gap", "test_cost", "test_gap"});
    if (method == "median") {
        CsvWriter solutions = csv(config, {"split", "instance", "first_stage_edges"});
        std::vector<PolicyEvaluation> evals;
        for (const Dataset* data : {&ws.val, &ws.test}) {
            const auto decisions = median_decisions(ws, config, *data);
            evals.push_back(evaluate_decisions(decisions, *data, problem));
            int last = -1;
            for (std::size_t i = 0; i < data->size(); ++i) {
                const int id = data->scenarios[i].context_id();
                if (id == last) continue;
                last = id;
                solutions.row({to_string(data->split), static_cast<long long>(id), solution_cell(decisions[i])});
            }
        }
        metrics.row({method, evals[0].mean_cost, evals[0].mean_gap, evals[1].mean_cost, evals[1].mean_gap});
        emit(metrics, "metrics.csv");
        emit(solutions, "solutions.csv");
        return files;
    }

    GlmWeights w;
    if (method == "uncoordinated") {
        w = uncoordinated_imitation(ws.train, problem, config.train);
    } else {
        CoordinatedImitation fc = fully_coordinated_imitation(ws.train, problem, config.saa, config.train);
        w = fc.weights;
        if (ws.kind == ProblemKind::Mst) {
            const std::string path = join(out_dir, "coordinated_train.json");
            write_dataset(path, DatasetFile{ws.graph, ws.train, fc.targets});
            files.push_back(path);
        }
    }
    const auto ev = evaluate_policy(w, ws.val, problem, problem);
    const auto et = evaluate_policy(w, ws.test, problem, problem);
    metrics.row({method, ev.mean_cost, ev.mean_gap, et.mean_cost, et.mean_gap});
    CsvWriter weights = csv(config, weight_header(p));
    weights.row(weight_row(0, "final", w.w));
    emit(metrics, "metrics.csv");
    emit(weights, "weights.csv");
    return files;
}

VerifyOutcome cmd_verify(const RunConfig& config, const std::string& suite, const std::string& out_dir) {
    config.validate();
    VerifyOutcome outcome = run_verify_suite(config, suite);
    ensure_dir(out_dir);
    CsvWriter report = csv(config, {"check", "instance_seed", "measured", "relation", "threshold", "pass"});
    for (const auto& r : outcome.rows)
        report.row({r.check, r.instance, r.measured, r.relation, r.threshold, static_cast<long long>(r.pass)});
    report.write(join(out_dir, "verify_" + suite + ".csv"));
    return outcome;
}

SweepPoint toy_sweep_point(const RunConfig& config, double epsilon, int nb_seeds) {
    const TabularProblem toy = make_toy_problem();
    const Dataset data = make_toy_dataset(config.toy_train_size);
    SweepPoint point;
    point.epsilon = epsilon;
    point.seeds = nb_seeds;
    for (int k = 0; k < nb_seeds; ++k) {
        TrainConfig train = config.train;
        train.epsilon = epsilon;
        train.seed = config.seed + static_cast<std::uint64_t>(k);
        const WeightTrajectory traj = train_primal_dual(data, toy, train);
        // Constant feature 1: theta = w0, and y = 1 (the optimum) iff theta > 0.
        if (traj.running_average.back().at(0) > 0.0) ++point.optimal;
    }
    return point;
}

std::vector<SweepPoint> cmd_sweep_epsilon(const RunConfig& config, const std::string& out_dir) {
    config.validate();
    if (config.problem != ProblemKind::Toy) throw InputError("sweep-epsilon runs on the toy problem (run.problem = toy)");
    std::vector<SweepPoint> points;
    CsvWriter out = csv(config, {"epsilon", "proportion_optimal", "optimal", "seeds"});
    for (double eps : config.sweep.epsilons) {
        points.push_back(toy_sweep_point(config, eps, config.sweep.nb_seeds));
        const SweepPoint& p = points.back();
        out.row({p.epsilon, p.proportion(), static_cast<long long>(p.optimal), static_cast<long long>(p.seeds)});
        spdlog::info("sweep: epsilon {} proportion {}", p.epsilon, p.proportion());
    }
    ensure_dir(out_dir);
    out.write(join(out_dir, "sweep_epsilon.csv"));
    return points;
}

std::vector<std::string> cmd_evaluate(const RunConfig& config, const std::string& weights_path,
                                      const std::string& data_dir, const std::string& out_dir) {
    config.validate();
    const CsvTable table = parse_csv(read_text_file(weights_path));
    if (table.rows.empty()) throw InputError("weights file has no rows");
    const std::size_t kind_col = table.column("kind");
    const std::vector<std::string>* chosen = &table.rows.back();
    for (const auto& row : table.rows)
        if (row[kind_col] == "average") chosen = &row;
    GlmWeights w;
    for (std::size_t k = 0; k < table.header.size(); ++k) {
        if (table.header[k].rfind('w', 0) != 0) continue;
        try {
            w.w.push_back(std::stod((*chosen)[k]));
        } catch (const std::exception&) {
            throw InputError("weights file holds a non-numeric weight");
        }
    }
    const Workspace ws = open_workspace(config, data_dir);
    if (w.w.size() != ws.train.scenarios.front().features().cols)
        throw InputError("weight length differs from the dataset feature width");
    ensure_dir(out_dir);
    CsvWriter out = csv(config, {"split", "mean_cost", "mean_gap"});
    for (const Dataset* data : {&ws.val, &ws.test}) {
        const auto e = evaluate_policy(w, *data, *ws.problem, *ws.problem);
        out.row({to_string(data->split), e.mean_cost, e.mean_gap});
    }
    const std::string path = join(out_dir, "evaluation.csv");
    out.write(path);
    return {path};
}

}  // namespace costru::app
