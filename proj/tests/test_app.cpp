#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "costru/app/commands.hpp"
#include "costru/app/config.hpp"
#include "costru/app/csv.hpp"

using namespace costru;
using namespace costru::app;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("costru_test_app_" + name);
    fs::remove_all(dir);
    return dir;
}

RunConfig tiny_mst() {
    RunConfig c = parse_config(R"(
[run]
problem = mst
seed = 3
[generator]
rows = 3
cols = 3
train_size = 3
val_size = 2
test_size = 2
scenarios_per_instance = 4
[train]
nb_iterations = 2
nb_scenarios = 2
nb_samples = 5
nb_epochs = 2
lr_init = 0.01
epsilon = 1
[saa]
lagrangian_iters = 10
[median]
reference_samples = 5
)");
    return c;
}

}  // namespace

TEST_CASE("config defaults depend on the problem") {
    const RunConfig toy = parse_config("[run]\nproblem = toy\n");
    CHECK(toy.problem == ProblemKind::Toy);
    CHECK(toy.train.lr_init == 0.1);
    CHECK(toy.train.nb_samples == 1000);
    const RunConfig mst = parse_config("");
    CHECK(mst.problem == ProblemKind::Mst);
    CHECK(mst.train.lr_init == 1e-5);
    CHECK(mst.train.epsilon == 1e-4);
    CHECK(load_config("").hash() == mst.hash());
}

TEST_CASE("config parsing rejects unknown keys and bad values") {
    CHECK_THROWS_AS(parse_config("[train]\nnb_iteration = 3\n"), InputError);
    CHECK_THROWS_AS(parse_config("[nosuch]\nx = 1\n"), InputError);
    CHECK_THROWS_AS(parse_config("[train]\nlr_init = abc\n"), InputError);
    CHECK_THROWS_AS(parse_config("[train]\nlr_init = -1\n"), InputError);
    CHECK_THROWS_AS(parse_config("[run]\nproblem = knapsack\n"), InputError);
    CHECK_THROWS_AS(parse_config("[lab]\nregularizer = nope\n"), InputError);
    CHECK_THROWS_AS(load_config("/nonexistent/costru.ini"), IoError);
}

TEST_CASE("config hash is a function of the resolved values") {
    const RunConfig a = parse_config("[train]\nepsilon = 0.5\n[sweep]\nepsilons = 1, 2.5\n");
    const RunConfig b = parse_config("[sweep]\nepsilons = 1,2.5\n[train]\nepsilon = 5e-1\n");
    CHECK(a.hash() == b.hash());
    CHECK(a.canonical() == b.canonical());
    CHECK(a.sweep.epsilons == std::vector<double>{1.0, 2.5});
    RunConfig c = a;
    c.set_seed(9);
    CHECK(c.train.seed == 9);
    CHECK(c.hash() != a.hash());
    CHECK(parse_config("").hash() != a.hash());
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("CSV writer and reader") {
    CsvWriter w(0xabcULL, 7, {"name", "count", "value"});
    w.row({std::string("x"), 3LL, 0.1});
    w.row({std::string("y"), -1LL, 1e-300});
    CHECK(w.nb_rows() == 2);
    CHECK(w.text().rfind("# config_hash=0000000000000abc seed=7\nname,count,value\n", 0) == 0);
    CHECK_THROWS_AS(w.row({std::string("short")}), InputError);
    const CsvTable t = parse_csv(w.text());
    CHECK(t.header == std::vector<std::string>{"name", "count", "value"});
    REQUIRE(t.rows.size() == 2);
    CHECK(std::stod(t.rows[0][t.column("value")]) == 0.1);
    CHECK(std::stod(t.rows[1][2]) == 1e-300);
    CHECK_THROWS_AS(t.column("missing"), InputError);
}

TEST_CASE("generate and train are byte-deterministic") {
    const RunConfig cfg = tiny_mst();
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    cmd_generate(cfg, (a / "data").string());
    cmd_generate(cfg, (b / "data").string());
    for (const char* f : {"manifest.json", "train.json", "val.json", "test.json"})
        CHECK(slurp(a / "data" / f) == slurp(b / "data" / f));
    for (const std::string method : {"primal-dual", "uncoordinated", "fully-coordinated", "median"}) {
        cmd_train(cfg, method, (a / "data").string(), (a / method).string());
        cmd_train(cfg, method, (b / "data").string(), (b / method).string());
        for (const auto& entry : fs::directory_iterator(a / method)) {
            const std::string name = entry.path().filename().string();
            if (name == "timing.csv") continue;
            CHECK_MESSAGE(slurp(entry.path()) == slurp(b / method / name), method << "/" << name);
        }
    }
    const CsvTable metrics = parse_csv(slurp(a / "primal-dual" / "metrics.csv"));
    CHECK(metrics.rows.size() == 2);
    CHECK(fs::exists(a / "primal-dual" / "timing.csv"));
    CHECK(fs::exists(a / "fully-coordinated" / "coordinated_train.json"));
    CHECK(fs::exists(a / "median" / "solutions.csv"));

    cmd_evaluate(cfg, (a / "primal-dual" / "weights.csv").string(), (a / "data").string(), (a / "eval").string());
    const CsvTable ev = parse_csv(slurp(a / "eval" / "evaluation.csv"));
    CHECK(ev.rows.size() == 2);
    CHECK(std::stod(ev.rows[0][ev.column("mean_gap")]) >= 0.0);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("train rejects mismatched or missing workspaces") {
    const RunConfig cfg = tiny_mst();
    const fs::path dir = scratch("mismatch");
    CHECK_THROWS_AS(cmd_train(cfg, "primal-dual", (dir / "missing").string(), (dir / "out").string()), IoError);
    RunConfig toy = parse_config("[run]\nproblem = toy\n");
    cmd_generate(toy, (dir / "toy").string());
    CHECK_THROWS_AS(cmd_train(cfg, "primal-dual", (dir / "toy").string(), (dir / "out").string()), InputError);
    CHECK_THROWS_AS(cmd_train(toy, "gradient-boost", (dir / "toy").string(), (dir / "out").string()), InputError);
    fs::remove_all(dir);
}

TEST_CASE("toy workflow: train, sweep and verify outputs") {
    RunConfig toy = parse_config("[run]\nproblem = toy\n[sweep]\nepsilons = 1, 5\nnb_seeds = 3\n");
    const fs::path dir = scratch("toy");
    cmd_generate(toy, (dir / "data").string());
    cmd_train(toy, "median", (dir / "data").string(), (dir / "median").string());
    const CsvTable m = parse_csv(slurp(dir / "median" / "metrics.csv"));
    CHECK(m.rows.size() == 1);
    const auto points = cmd_sweep_epsilon(toy, (dir / "sweep").string());
    REQUIRE(points.size() == 2);
    CHECK(points[0].optimal == 0);
    CHECK(points[1].optimal == 3);
    const CsvTable sweep = parse_csv(slurp(dir / "sweep" / "sweep_epsilon.csv"));
    CHECK(sweep.rows.size() == 2);
    CHECK(sweep.comment.find("config_hash=") != std::string::npos);

    RunConfig mst = tiny_mst();
    CHECK_THROWS_AS(cmd_sweep_epsilon(mst, (dir / "sweep2").string()), InputError);
    const VerifyOutcome v = cmd_verify(mst, "jensen-gap", (dir / "verify").string());
    CHECK(v.passed());
    const CsvTable vt = parse_csv(slurp(dir / "verify" / "verify_jensen-gap.csv"));
    CHECK(vt.header == std::vector<std::string>{"check", "instance_seed", "measured", "relation", "threshold", "pass"});
    CHECK(vt.rows.size() == v.rows.size());
    CHECK_THROWS_AS(cmd_verify(mst, "no-such-suite", (dir / "verify").string()), InputError);
    fs::remove_all(dir);
}
