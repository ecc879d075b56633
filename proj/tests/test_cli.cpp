#include "helpers.hpp"

#include "prach/cli.hpp"
#include "prach/config.hpp"
#include "prach/dataset_io.hpp"
#include "prach/feature_io.hpp"
#include "prach/report.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

using namespace prach;
namespace fs = std::filesystem;

namespace {

int cli(const std::vector<std::string>& args, std::string* out_text = nullptr) {
    std::ostringstream out, err;
    const int rc = run_cli(args, out, err);
    if (out_text) *out_text = out.str();
    return rc;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExperimentConfig tiny_config() {
    ExperimentConfig cfg;
    cfg.gen.n_records = 300;
    cfg.noise_levels = {0.1};
    cfg.repeats = 1;
    cfg.master_seed = 11;
    cfg.classifiers = {ClassifierKind::Knn, ClassifierKind::GaussianNb};
    cfg.grids[ClassifierKind::Knn] = {{ClassifierKind::Knn, KnnParams{5}}};
    return cfg;
}

}  // namespace

TEST_CASE("gen writes data, sidecar and manifest") {
    const auto dir = testutil::temp_dir("cli_gen");
    REQUIRE(cli({"gen", "--set", "gen.n_records=200", "--out", dir.string()}) == 0);
    const Dataset ds = load_dataset(dir / "dataset.csv");
    CHECK(ds.size() == 200);
    CHECK(fs::exists(sidecar_path(dir / "dataset.csv")));
    const auto m = read_json_file(dir / "manifest.json");
    CHECK(m.at("command") == "gen");
    CHECK(m.at("params").at("gen").at("n_records") == 200);
}

TEST_CASE("exit codes") {
    const auto dir = testutil::temp_dir("cli_codes");
    REQUIRE(cli({"gen", "--set", "gen.n_records=100", "--out", dir.string()}) == 0);
    CHECK(cli({"inject", "--in", (dir / "dataset.csv").string(), "--fraction", "1.5", "--out", dir.string()}) == 2);
    CHECK(cli({"inject", "--in", (dir / "missing.csv").string(), "--fraction", "0.1", "--out", dir.string()}) == 3);
    CHECK(cli({"no-such-command"}) == 2);
    CHECK(cli({"gen"}) == 2);
    CHECK(cli({"gen", "--set", "gen.n_records=-5", "--out", dir.string()}) == 2);
}

TEST_CASE("transform and train produce readable artifacts") {
    const auto dir = testutil::temp_dir("cli_pipeline");
    REQUIRE(cli({"gen", "--set", "gen.n_records=300", "--out", dir.string()}) == 0);
    REQUIRE(cli({"inject", "--in", (dir / "dataset.csv").string(), "--fraction", "0.1", "--seed", "3", "--out",
                 dir.string()}) == 0);
    CHECK(load_dataset(dir / "noisy.csv").provenance().noise.size() == 1);
    REQUIRE(cli({"transform", "--in", (dir / "noisy.csv").string(), "--space", "pca", "--out", dir.string()}) == 0);
    CHECK(load_feature_matrix(dir / "features.csv").cols() == 2);
    CHECK(fs::exists(dir / "pca.json"));
    REQUIRE(cli({"train", "--in", (dir / "features.csv").string(), "--classifier", "nb", "--self-train", "--out",
                 dir.string()}) == 0);
    CHECK(load_model((dir / "model.json").string()).input_dim() == 2);
    CHECK(slurp(dir / "audit.csv").rfind("cycle,", 0) == 0);
}

TEST_CASE("eval is reproducible and matches the library" * doctest::test_suite("invariant")) {
    const auto base = testutil::temp_dir("cli_eval");
    const auto cfg = tiny_config();
    write_json_file(base / "cfg.json", config_to_json(cfg));
    const auto a = base / "a", b = base / "b";
    REQUIRE(cli({"eval", "--config", (base / "cfg.json").string(), "--out", a.string()}) == 0);
    REQUIRE(cli({"eval", "--config", (base / "cfg.json").string(), "--out", b.string(), "--jobs", "2"}) == 0);
    for (auto f : {"report.json", "cells.csv", "fusion.csv", "report.md"}) CHECK(slurp(a / f) == slurp(b / f));
    const auto rep = run_experiment(cfg, 1);
    CHECK(slurp(a / "cells.csv") == cells_csv(rep));

    std::string text;
    REQUIRE(cli({"report", "--in", a.string(), "--format", "csv", "--table", "fusion"}, &text) == 0);
    CHECK(text == fusion_csv(rep));
}

TEST_CASE("gen, inject, eval --data reproduces the in-process run" * doctest::test_suite("invariant")) {
    const auto dir = testutil::temp_dir("cli_chain");
    const auto cfg = tiny_config();
    const double level = cfg.noise_levels[0];
    write_json_file(dir / "cfg.json", config_to_json(cfg));
    REQUIRE(cli({"gen", "--config", (dir / "cfg.json").string(), "--set",
                 "gen.seed=" + std::to_string(repeat_gen_seed(cfg, 0)), "--out", dir.string()}) == 0);
    REQUIRE(cli({"inject", "--in", (dir / "dataset.csv").string(), "--fraction", "0.1", "--mode", "awgn", "--seed",
                 std::to_string(cell_seed(cfg, "noise", 0, level)), "--out", dir.string()}) == 0);
    const auto out = dir / "eval";
    REQUIRE(cli({"eval", "--config", (dir / "cfg.json").string(), "--data", (dir / "noisy.csv").string(), "--out",
                 out.string()}) == 0);
    const auto rep = run_experiment(cfg, 1);
    CHECK(slurp(out / "cells.csv") == cells_csv(rep));
    CHECK(slurp(out / "fusion.csv") == fusion_csv(rep));

    auto two = cfg;
    two.repeats = 2;
    write_json_file(dir / "two.json", config_to_json(two));
    CHECK(cli({"eval", "--config", (dir / "two.json").string(), "--data", (dir / "noisy.csv").string(), "--out",
               out.string()}) == 2);
}

TEST_CASE("the installed binary runs") {
    const auto dir = testutil::temp_dir("cli_bin");
    const std::string cmd = std::string(PRACHFUSE_BIN) + " gen --set gen.n_records=50 --out " + dir.string() +
                            " > " + (dir / "log.txt").string() + " 2>&1";
    CHECK(std::system(cmd.c_str()) == 0);
    CHECK(fs::exists(dir / "manifest.json"));
    const std::string bad = std::string(PRACHFUSE_BIN) + " inject --in nowhere.csv --fraction 2 --out " +
                            dir.string() + " > /dev/null 2>&1";
    const int status = std::system(bad.c_str());
    CHECK(WEXITSTATUS(status) == 2);
}
