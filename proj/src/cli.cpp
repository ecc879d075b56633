#include "prach/cli.hpp"

#include "prach/config.hpp"
#include "prach/dataset_io.hpp"
#include "prach/feature_io.hpp"
#include "prach/noise.hpp"
#include "prach/pca.hpp"
#include "prach/report.hpp"
#include "prach/tune.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

namespace prach {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr std::string_view kToolName = "prachfuse";

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

void require_file(const fs::path& p) {
    if (!fs::is_regular_file(p)) throw IoError("missing input file " + p.string());
}

// Every run leaves manifest.json describing exactly what produced its outputs.
void write_manifest(const fs::path& dir, std::string_view command, const json& params,
                    const std::vector<std::string>& outputs) {
    json m;
    m["tool"] = std::string(kToolName);
    m["command"] = std::string(command);
    m["params"] = params;
    m["outputs"] = outputs;
    write_json_file(dir / "manifest.json", m);
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const int v = std::stoi(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw ConfigError("not an integer list: " + text);
        }
    }
    if (out.empty()) throw ConfigError("empty integer list");
    return out;
}

struct Options {
    std::string config;
    std::vector<std::string> overrides;
    std::string out_dir;
    std::string in;
    int jobs = 1;
    // inject
    double fraction = 0.0;
    std::string mode = "awgn";
    std::uint64_t seed = 0;
    // transform / train / sweep-j
    std::string space = "psr";
    std::string classifier = "elm";
    bool self_train = false;
    std::string j_list = "5,10,20,50,100,200";
    double noise = 0.15;
    std::string data;
    // report
    std::string format = "md";
    std::string table = "cells";
    std::string out_file;
};

int cmd_gen(const Options& o, std::ostream& out) {
    const ExperimentConfig cfg = load_config(o.config, o.overrides);
    const fs::path dir(o.out_dir);
    ensure_dir(dir);
    const Dataset ds = generate_dataset(cfg.gen);
    save_dataset(ds, dir / "dataset.csv");
    write_manifest(dir, "gen", {{"gen", gen_config_to_json(cfg.gen)}},
                   {"dataset.csv", sidecar_path("dataset.csv").string()});
    out << "wrote " << ds.size() << " records (" << ds.count(Label::Peak) << " Peak) to " << (dir / "dataset.csv").string()
        << '\n';
    return 0;
}

int cmd_inject(const Options& o, std::ostream& out) {
    const NoiseSpec spec{o.fraction, parse_noise_mode(o.mode), o.seed};
    spec.validate();
    require_file(o.in);
    const fs::path dir(o.out_dir);
    ensure_dir(dir);
    const Dataset noisy = inject(load_dataset(o.in), spec);
    save_dataset(noisy, dir / "noisy.csv");
    write_manifest(dir, "inject",
                   {{"in", o.in}, {"fraction", o.fraction}, {"mode", std::string(to_string(spec.mode))}, {"seed", o.seed}},
                   {"noisy.csv", sidecar_path("noisy.csv").string()});
    out << "corrupted " << noisy.provenance().noise.back().corrupted << " of " << noisy.size() << " records\n";
    return 0;
}

int cmd_transform(const Options& o, std::ostream& out) {
    const ExperimentConfig cfg = load_config(o.config, o.overrides);
    require_file(o.in);
    const fs::path dir(o.out_dir);
    ensure_dir(dir);
    const SpaceTag space = parse_space(o.space);
    const FeatureMatrix raw = raw_matrix(load_dataset(o.in));
    std::vector<std::string> outputs{"features.csv"};
    json params{{"in", o.in}, {"space", std::string(to_string(space))}};
    FeatureMatrix result;
    if (space == SpaceTag::Psr) {
        result = psr_features(raw, cfg.psr);
        params["psr"] = {{"embed_dim", cfg.psr.embed_dim}, {"time_lag", cfg.psr.time_lag}};
    } else if (space == SpaceTag::Pca) {
        const PcaModel model = pca_fit(raw, cfg.pca_k);
        result = pca_project(model, raw);
        write_json_file(dir / "pca.json", pca_to_json(model));
        outputs.push_back("pca.json");
        params["pca_k"] = cfg.pca_k;
    } else {
        result = raw;
    }
    save_feature_matrix(result, dir / "features.csv");
    write_manifest(dir, "transform", params, outputs);
    out << "wrote " << result.rows() << " x " << result.cols() << " " << to_string(space) << " features\n";
    return 0;
}

int cmd_train(const Options& o, std::ostream& out) {
    const ExperimentConfig cfg = load_config(o.config, o.overrides);
    require_file(o.in);
    const fs::path dir(o.out_dir);
    ensure_dir(dir);
    const FeatureMatrix data = load_feature_matrix(o.in);
    const ClassifierKind kind = parse_classifier_kind(o.classifier);
    const std::uint64_t seed = derive_seed(cfg.master_seed, {hash_tag("train")});
    std::vector<ClassifierSpec> grid;
    if (auto it = cfg.grids.find(kind); it != cfg.grids.end())
        grid = it->second;
    else
        grid = default_grid(kind, derive_seed(seed, {hash_tag("weights")}));

    std::vector<std::string> outputs{"model.json"};
    json params{{"in", o.in},
                {"classifier", std::string(to_string(kind))},
                {"self_train", o.self_train},
                {"config", config_to_json(cfg)}};
    TrainedModel model;
    if (o.self_train) {
        const auto init = stratified_split(data.labels, cfg.sampling.initial_fraction,
                                           derive_seed(seed, {hash_tag("initial"), cfg.sampling.seed}));
        const FeatureMatrix train0 = data.subset(init.train);
        const auto tuned = tune(grid, train0, cfg.tune_folds, derive_seed(seed, {hash_tag("folds")}));
        const auto st = self_train(train0, data.subset(init.test), tuned.best, cfg.sampling);
        model = st.model;
        std::ofstream audit(dir / "audit.csv");
        if (!audit) throw IoError("cannot write " + (dir / "audit.csv").string());
        write_audit_csv(st.cycles, audit);
        outputs.push_back("audit.csv");
        out << "self-trained " << tuned.best.describe() << " over " << st.cycles.size() << " cycles\n";
    } else {
        const auto tuned = tune(grid, data, cfg.tune_folds, derive_seed(seed, {hash_tag("folds")}));
        model = fit(tuned.best, data);
        out << "fitted " << tuned.best.describe() << " (cv F1 " << tuned.best_score << ")\n";
    }
    save_model(model, (dir / "model.json").string());
    write_manifest(dir, "train", params, outputs);
    return 0;
}

ExperimentConfig eval_config(const Options& o) { return load_config(o.config, o.overrides); }

int cmd_eval(const Options& o, std::ostream& out) {
    const ExperimentConfig cfg = eval_config(o);
    const fs::path dir(o.out_dir);
    ensure_dir(dir);
    ExperimentReport rep;
    json params{{"config", config_to_json(cfg)}, {"jobs", o.jobs}};
    if (!o.data.empty()) {
        require_file(o.data);
        if (cfg.repeats != 1) throw ConfigError("--data runs a single repeat; set repeats=1");
        rep = run_experiment_on(cfg, {load_dataset(o.data)}, o.jobs);
        params["data"] = o.data;
    } else {
        rep = run_experiment(cfg, o.jobs);
    }
    write_report(dir, rep);
    write_manifest(dir, "eval", params, {"report.json", "cells.csv", "fusion.csv", "report.md"});
    out << report_markdown(rep);
    return 0;
}

int cmd_sweep(const Options& o, std::ostream& out) {
    const ExperimentConfig cfg = eval_config(o);
    const auto js = parse_int_list(o.j_list);
    const SpaceTag space = parse_space(o.space);
    const ClassifierKind kind = parse_classifier_kind(o.classifier);
    const fs::path dir(o.out_dir);
    ensure_dir(dir);
    const auto curve = j_sweep(cfg, js, space, kind, o.noise, o.jobs);
    write_text_file(dir / "j_sweep.csv", j_curve_csv(curve));
    write_json_file(dir / "j_sweep.json", j_curve_to_json(curve));
    write_manifest(dir, "sweep-j",
                   {{"config", config_to_json(cfg)},
                    {"j", js},
                    {"space", std::string(to_string(space))},
                    {"classifier", std::string(to_string(kind))},
                    {"noise", o.noise},
                    {"jobs", o.jobs}},
                   {"j_sweep.csv", "j_sweep.json"});
    out << j_curve_csv(curve);
    return 0;
}

int cmd_report(const Options& o, std::ostream& out) {
    const fs::path src = fs::is_directory(o.in) ? fs::path(o.in) / "report.json" : fs::path(o.in);
    require_file(src);
    const ExperimentReport rep = report_from_json(read_json_file(src));
    std::string text;
    if (o.format == "md")
        text = report_markdown(rep);
    else if (o.format == "csv")
        text = o.table == "fusion" ? fusion_csv(rep) : cells_csv(rep);
    else if (o.format == "json")
        text = report_to_json(rep).dump(2) + "\n";
    else
        throw ConfigError("unknown report format " + o.format);
    if (o.out_file.empty())
        out << text;
    else
        write_text_file(o.out_file, text);
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Synthetic PRACH peak classification with noise injection, self-training and fusion",
                 std::string(kToolName)};
    app.require_subcommand(1);
    Options o;

    auto add_config = [&](CLI::App* sub) {
        sub->add_option("--config,-c", o.config, "JSON config file (defaults when omitted)");
        sub->add_option("--set", o.overrides, "Override as dotted.key=value")->take_all();
    };

    auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset");
    add_config(gen);
    gen->add_option("--out,-o", o.out_dir, "Output directory")->required();

    auto* inj = app.add_subcommand("inject", "Corrupt a dataset with noise");
    inj->add_option("--in,-i", o.in, "Dataset CSV")->required();
    inj->add_option("--fraction", o.fraction, "Fraction of records to corrupt")->required();
    inj->add_option("--mode", o.mode, "awgn or flip");
    inj->add_option("--seed", o.seed, "Noise seed");
    inj->add_option("--out,-o", o.out_dir, "Output directory")->required();

    auto* tr = app.add_subcommand("transform", "Build PSR or PCA features from a dataset");
    add_config(tr);
    tr->add_option("--in,-i", o.in, "Dataset CSV")->required();
    tr->add_option("--space", o.space, "psr, pca or raw");
    tr->add_option("--out,-o", o.out_dir, "Output directory")->required();

    auto* train = app.add_subcommand("train", "Tune and fit one classifier on a feature CSV");
    add_config(train);
    train->add_option("--in,-i", o.in, "Feature CSV")->required();
    train->add_option("--classifier", o.classifier, "tree, knn, elm or nb");
    train->add_flag("--self-train", o.self_train, "Start from the initial labeled fraction and self-train");
    train->add_option("--out,-o", o.out_dir, "Output directory")->required();

    auto* ev = app.add_subcommand("eval", "Run the full experiment grid");
    add_config(ev);
    ev->add_option("--out,-o", o.out_dir, "Output directory")->required();
    ev->add_option("--jobs,-j", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
    ev->add_option("--data", o.data, "Use this dataset instead of generating (single repeat)");

    auto* sweep = app.add_subcommand("sweep-j", "Self-training F1 as a function of J");
    add_config(sweep);
    sweep->add_option("--j", o.j_list, "Comma-separated J values");
    sweep->add_option("--space", o.space, "psr or pca");
    sweep->add_option("--classifier", o.classifier, "tree, knn, elm or nb");
    sweep->add_option("--noise", o.noise, "Noise fraction");
    sweep->add_option("--out,-o", o.out_dir, "Output directory")->required();
    sweep->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);

    auto* rep = app.add_subcommand("report", "Render a stored report");
    rep->add_option("--in,-i", o.in, "Report directory or report.json")->required();
    rep->add_option("--format", o.format, "md, csv or json");
    rep->add_option("--table", o.table, "cells or fusion (csv only)");
    rep->add_option("--out,-o", o.out_file, "Write to this file instead of stdout");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(ErrorCategory::Config);
    }

    try {
        if (gen->parsed()) return cmd_gen(o, out);
        if (inj->parsed()) return cmd_inject(o, out);
        if (tr->parsed()) return cmd_transform(o, out);
        if (train->parsed()) return cmd_train(o, out);
        if (ev->parsed()) return cmd_eval(o, out);
        if (sweep->parsed()) return cmd_sweep(o, out);
        if (rep->parsed()) return cmd_report(o, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(e.category());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return static_cast<int>(ErrorCategory::Config);
}

}  // namespace prach
