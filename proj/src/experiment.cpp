#include "prach/experiment.hpp"

#include "prach/noise.hpp"
#include "prach/pca.hpp"
#include "prach/tune.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <sstream>
#include <thread>

namespace prach {

void ExperimentConfig::validate() const {
    gen.validate();
    sampling.validate();
    psr.validate();
    if (repeats < 1) throw ConfigError("repeats must be >= 1");
    if (!(split > 0.0 && split < 1.0)) throw ConfigError("split must lie in (0,1)");
    if (noise_levels.empty()) throw ConfigError("noise_levels must not be empty");
    for (double n : noise_levels)
        if (!(n >= 0.0 && n <= 1.0)) throw ConfigError("noise levels must lie in [0,1]");
    if (classifiers.empty()) throw ConfigError("at least one classifier is required");
    if (feature_spaces.empty()) throw ConfigError("at least one feature space is required");
    if (pca_k < 1 || pca_k > kNumFeatures) throw ConfigError("pca_k must lie in [1,4]");
    if (tune_folds < 2) throw ConfigError("tune_folds must be >= 2");
    for (const auto& [kind, grid] : grids) {
        if (grid.empty()) throw ConfigError("empty grid for " + std::string(to_string(kind)));
        for (const auto& s : grid) {
            if (s.kind != kind) throw ConfigError("grid entry kind does not match its key");
            s.validate();
        }
    }
}

std::uint64_t noise_key(double level) { return static_cast<std::uint64_t>(std::llround(level * 1e6)); }

std::uint64_t cell_seed(const ExperimentConfig& cfg, std::string_view tag, std::size_t repeat, double noise,
                        std::uint64_t extra) {
    return derive_seed(cfg.master_seed, {hash_tag(tag), repeat, noise_key(noise), extra});
}

std::uint64_t repeat_gen_seed(const ExperimentConfig& cfg, std::size_t repeat) {
    return derive_seed(cfg.master_seed, {hash_tag("gen"), repeat});
}

Dataset repeat_dataset(const ExperimentConfig& cfg, std::size_t repeat) {
    GenConfig g = cfg.gen;
    g.seed = repeat_gen_seed(cfg, repeat);
    return generate_dataset(g);
}

namespace {

std::uint64_t space_key(SpaceTag s) { return static_cast<std::uint64_t>(s) + 1; }
std::uint64_t kind_key(ClassifierKind k) { return static_cast<std::uint64_t>(k) + 1; }

FeatureMatrix transform_like(SpaceTag space, const FeatureMatrix& raw, const ExperimentConfig& cfg,
                             const PcaModel* pca) {
    switch (space) {
        case SpaceTag::Raw: return raw;
        case SpaceTag::Psr: return psr_features(raw, cfg.psr);
        case SpaceTag::Pca: return pca_project(*pca, raw);
    }
    throw ConfigError("unknown feature space");
}

std::string error_text(const std::exception& e) { return e.what(); }

// Runs task(i) for i in [0, n) on up to `jobs` threads; rethrows the first failure.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& task) {
    const auto workers = static_cast<std::size_t>(std::max(1, jobs));
    if (workers == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, n); ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    task(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace

PreparedUnit prepare_unit(const ExperimentConfig& cfg, const Dataset& clean, std::size_t repeat, double noise) {
    PreparedUnit u;
    u.repeat = repeat;
    u.noise = noise;
    u.seeds["gen"] = repeat_gen_seed(cfg, repeat);
    u.seeds["noise"] = cell_seed(cfg, "noise", repeat, noise);
    u.seeds["split"] = cell_seed(cfg, "split", repeat, noise);
    u.seeds["initial"] = cell_seed(cfg, "initial", repeat, noise, cfg.sampling.seed);

    const auto& recorded = clean.provenance().noise;
    if (recorded.empty()) {
        u.noisy = inject(clean, NoiseSpec{noise, cfg.noise_mode, u.seeds["noise"]});
    } else {
        // Already corrupted on disk: use as is when it matches this level.
        if (recorded.size() != 1 || noise_key(recorded[0].fraction) != noise_key(noise) ||
            recorded[0].mode != cfg.noise_mode)
            throw ConfigError("dataset already carries noise that does not match level " + std::to_string(noise));
        u.noisy = clean;
        u.seeds["noise"] = recorded[0].seed;
    }
    const auto labels = u.noisy.labels();
    u.split = stratified_split(labels, cfg.split, u.seeds["split"]);
    const FeatureMatrix raw = raw_matrix(u.noisy);
    const FeatureMatrix raw_train = raw.subset(u.split.train);
    const FeatureMatrix raw_test = raw.subset(u.split.test);
    u.initial = stratified_split(raw_train.labels, cfg.sampling.initial_fraction, u.seeds["initial"]);

    std::optional<PcaModel> pca;
    for (auto space : cfg.feature_spaces) {
        if (space == SpaceTag::Pca && !pca) pca = pca_fit(raw_train, cfg.pca_k);
        FeatureMatrix tr = transform_like(space, raw_train, cfg, pca ? &*pca : nullptr);
        FeatureMatrix te = transform_like(space, raw_test, cfg, pca ? &*pca : nullptr);
        u.train0[space] = tr.subset(u.initial.train);
        u.pool[space] = tr.subset(u.initial.test);
        u.train[space] = std::move(tr);
        u.test[space] = std::move(te);
        u.trackers.emplace(space, DensityTracker(u.pool.at(space).values, cfg.sampling.k_density));
    }
    return u;
}

TunedCell tune_cell(const ExperimentConfig& cfg, const PreparedUnit& unit, SpaceTag space, ClassifierKind kind,
                    bool baseline) {
    TunedCell t;
    t.seed = cell_seed(cfg, "cell", unit.repeat, unit.noise, space_key(space) * 16 + kind_key(kind));
    std::vector<ClassifierSpec> grid;
    if (auto it = cfg.grids.find(kind); it != cfg.grids.end())
        grid = it->second;
    else
        grid = default_grid(kind, derive_seed(t.seed, {hash_tag("weights")}));
    const auto result = tune(grid, unit.train0.at(space), cfg.tune_folds, derive_seed(t.seed, {hash_tag("folds")}));
    t.spec = result.best;
    t.cv_f1 = result.best_score;
    if (baseline) {
        const auto base = tune(grid, unit.train.at(space), cfg.tune_folds, derive_seed(t.seed, {hash_tag("base_folds")}));
        t.base_spec = base.best;
        t.base_cv_f1 = base.best_score;
    }
    return t;
}

CellRun run_cell_with_budget(const ExperimentConfig& cfg, const PreparedUnit& unit, SpaceTag space,
                             const TunedCell& tuned, int j) {
    CellRun run;
    run.space = space;
    run.kind = tuned.spec.kind;
    run.tuned = tuned;
    try {
        SamplingConfig sc = cfg.sampling;
        sc.j = j;
        const auto st = self_train(unit.train0.at(space), unit.pool.at(space), tuned.spec, sc,
                                   &unit.trackers.at(space));
        const auto& test = unit.test.at(space);
        Posterior p = st.model.posterior(test);
        const auto pred = labels_from_posterior(p);
        run.f1 = f1_score(test.labels, pred);
        run.acc = accuracy(test.labels, pred);
        run.cycles = st.cycles.size();
        for (const auto& c : st.cycles)
            for (std::size_t i = 0; i < c.moved.size(); ++i) run.pseudo_label_errors += c.pseudo_labels[i] != c.true_labels[i];
        run.model = st.model;
        run.test_posterior = std::move(p);
    } catch (const Error& e) {
        run.error = error_text(e);
    }
    return run;
}

CellRun run_cell(const ExperimentConfig& cfg, const PreparedUnit& unit, SpaceTag space, ClassifierKind kind,
                 bool baseline) {
    TunedCell tuned;
    try {
        tuned = tune_cell(cfg, unit, space, kind, baseline);
    } catch (const Error& e) {
        CellRun run;
        run.space = space;
        run.kind = kind;
        run.error = "tuning: " + error_text(e);
        return run;
    }
    CellRun run = run_cell_with_budget(cfg, unit, space, tuned, cfg.sampling.j);
    if (baseline && !run.error) {
        try {
            const auto model = fit(tuned.base_spec, unit.train.at(space));
            const auto& test = unit.test.at(space);
            const auto pred = model.predict(test);
            run.base_f1 = f1_score(test.labels, pred);
            run.base_acc = accuracy(test.labels, pred);
        } catch (const Error& e) {
            run.error = "baseline: " + error_text(e);
        }
    }
    return run;
}

std::vector<FusionRun> run_fusion(const ExperimentConfig& cfg, const PreparedUnit& unit,
                                  const std::vector<CellRun>& cells) {
    std::vector<FusionRun> out(2);
    out[1].mode = FusionMode::MetaNb;
    auto fail = [&](const std::string& msg) {
        for (auto& f : out) f.error = msg;
        return out;
    };
    const SpaceTag spaces[2] = {SpaceTag::Psr, SpaceTag::Pca};
    try {
        const auto& train_labels = unit.train.at(SpaceTag::Psr).labels;
        const std::uint64_t seed = cell_seed(cfg, "stack", unit.repeat, unit.noise);
        const auto fold = stratified_folds(train_labels, 2, seed);
        struct Half {
            std::vector<std::size_t> fit_rows, held;
            SplitIndices init;
        };
        Half halves[2];
        for (int f = 0; f < 2; ++f) {
            auto& h = halves[f];
            for (std::size_t i = 0; i < fold.size(); ++i) (fold[i] == f ? h.held : h.fit_rows).push_back(i);
            std::vector<Label> fit_labels;
            for (auto i : h.fit_rows) fit_labels.push_back(train_labels[i]);
            h.init = stratified_split(fit_labels, cfg.sampling.initial_fraction,
                                      derive_seed(seed, {hash_tag("initial"), static_cast<std::uint64_t>(f)}));
        }

        // Out-of-fold posteriors of every candidate stream; the best per space
        // by out-of-fold F1 is fused (earlier cells win ties).
        const CellRun* best[2] = {nullptr, nullptr};
        Posterior best_oof[2];
        double best_f1[2] = {-1.0, -1.0};
        for (int s = 0; s < 2; ++s) {
            const auto& full = unit.train.at(spaces[s]);
            for (const auto& c : cells) {
                if (c.space != spaces[s] || c.error) continue;
                Posterior oof(static_cast<Eigen::Index>(train_labels.size()), 2);
                try {
                    for (const auto& h : halves) {
                        const FeatureMatrix part = full.subset(h.fit_rows);
                        const auto st = self_train(part.subset(h.init.train), part.subset(h.init.test), c.tuned.spec,
                                                   cfg.sampling);
                        const Posterior p = st.model.posterior(full.subset(h.held));
                        for (std::size_t r = 0; r < h.held.size(); ++r)
                            oof.row(static_cast<Eigen::Index>(h.held[r])) = p.row(static_cast<Eigen::Index>(r));
                    }
                } catch (const Error&) {
                    continue;
                }
                const double f1 = f1_score(train_labels, labels_from_posterior(oof));
                if (f1 > best_f1[s]) {
                    best_f1[s] = f1;
                    best[s] = &c;
                    best_oof[s] = std::move(oof);
                }
            }
        }
        if (!best[0] || !best[1]) return fail("fusion needs a fitted PSR and PCA stream");

        std::ostringstream names;
        names << "Psr:" << to_string(best[0]->kind) << "+Pca:" << to_string(best[1]->kind);
        for (auto& f : out) f.streams = names.str();

        const FusionModel weighted =
            (best_f1[0] + best_f1[1] > 0.0) ? make_weighted(best_f1[0], best_f1[1]) : make_weighted(1.0, 1.0);
        const FusionModel meta = fit_meta_nb(stream_features(best_oof[0], best_oof[1]), train_labels);

        const auto& truth = unit.test.at(SpaceTag::Psr).labels;
        const FusionModel* models[2] = {&weighted, &meta};
        for (int m = 0; m < 2; ++m) {
            const auto pred = fuse_predict_batch(*models[m], *best[0]->test_posterior, *best[1]->test_posterior);
            out[static_cast<std::size_t>(m)].f1 = f1_score(truth, pred);
            out[static_cast<std::size_t>(m)].acc = accuracy(truth, pred);
            out[static_cast<std::size_t>(m)].w_psr = weighted.w_psr;
            out[static_cast<std::size_t>(m)].w_pca = weighted.w_pca;
        }
    } catch (const Error& e) {
        return fail(error_text(e));
    }
    return out;
}

UnitResult run_unit(const ExperimentConfig& cfg, const Dataset& clean, std::size_t repeat, double noise) {
    UnitResult r;
    r.repeat = repeat;
    r.noise = noise;
    const PreparedUnit unit = prepare_unit(cfg, clean, repeat, noise);
    r.seeds = unit.seeds;
    for (auto space : cfg.feature_spaces)
        for (auto kind : cfg.classifiers) {
            r.cells.push_back(run_cell(cfg, unit, space, kind));
            r.seeds[std::string(to_string(space)) + "/" + std::string(to_string(kind))] = r.cells.back().tuned.seed;
        }
    const bool both = std::count(cfg.feature_spaces.begin(), cfg.feature_spaces.end(), SpaceTag::Psr) &&
                      std::count(cfg.feature_spaces.begin(), cfg.feature_spaces.end(), SpaceTag::Pca);
    if (cfg.fusion && both) r.fusion = run_fusion(cfg, unit, r.cells);
    for (auto& c : r.cells) {
        c.model.reset();
        c.test_posterior.reset();
    }
    return r;
}

const CellSummary& ExperimentReport::cell(SpaceTag space, ClassifierKind kind, double noise) const {
    for (const auto& c : cells)
        if (c.space == space && c.kind == kind && noise_key(c.noise) == noise_key(noise)) return c;
    throw DataError("no report cell for " + std::string(to_string(space)) + "/" + std::string(to_string(kind)));
}

const FusionSummary& ExperimentReport::fusion_row(FusionMode mode, double noise) const {
    for (const auto& f : fusion)
        if (f.mode == mode && noise_key(f.noise) == noise_key(noise)) return f;
    throw DataError("no fusion row for " + std::string(to_string(mode)));
}

namespace {
MeanStd summarize(const std::vector<double>& v) {
    std::vector<double> ok;
    for (double x : v)
        if (std::isfinite(x)) ok.push_back(x);
    if (ok.empty()) return {std::nan(""), std::nan("")};
    return mean_std(ok);
}
}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg, int jobs) {
    cfg.validate();
    std::vector<Dataset> clean(static_cast<std::size_t>(cfg.repeats));
    parallel_for(clean.size(), jobs, [&](std::size_t r) { clean[r] = repeat_dataset(cfg, r); });
    return run_experiment_on(cfg, clean, jobs);
}

ExperimentReport run_experiment_on(const ExperimentConfig& cfg, const std::vector<Dataset>& clean, int jobs) {
    cfg.validate();
    const auto repeats = static_cast<std::size_t>(cfg.repeats);
    if (clean.size() != repeats) throw ConfigError("need one dataset per repeat");
    for (const auto& d : clean)
        if (!d.provenance().noise.empty() && cfg.noise_levels.size() != 1)
            throw ConfigError("a pre-corrupted dataset needs exactly one configured noise level");

    const auto levels = cfg.noise_levels.size();
    std::vector<UnitResult> units(repeats * levels);
    parallel_for(units.size(), jobs, [&](std::size_t i) {
        const auto r = i / levels;
        units[i] = run_unit(cfg, clean[r], r, cfg.noise_levels[i % levels]);
    });

    ExperimentReport rep;
    rep.config = cfg;
    for (const auto& u : units) {
        std::ostringstream prefix;
        prefix << 'r' << u.repeat << "/n" << u.noise << '/';
        for (const auto& [k, v] : u.seeds) rep.seeds[prefix.str() + k] = v;
    }
    for (std::size_t li = 0; li < levels; ++li) {
        const double noise = cfg.noise_levels[li];
        for (std::size_t ci = 0; ci < cfg.feature_spaces.size() * cfg.classifiers.size(); ++ci) {
            CellSummary s;
            std::vector<double> f1, acc, bf1, bacc;
            for (std::size_t r = 0; r < repeats; ++r) {
                const auto& run = units[r * levels + li].cells[ci];
                s.space = run.space;
                s.kind = run.kind;
                s.noise = noise;
                const double nan = std::nan("");
                f1.push_back(run.error ? nan : run.f1);
                acc.push_back(run.error ? nan : run.acc);
                bf1.push_back(run.error ? nan : run.base_f1);
                bacc.push_back(run.error ? nan : run.base_acc);
                s.specs.push_back(run.tuned.spec.describe());
                s.base_specs.push_back(run.tuned.base_spec.describe());
                s.seeds.push_back(run.tuned.seed);
                if (run.error) s.errors.push_back("repeat " + std::to_string(r) + ": " + *run.error);
            }
            s.f1 = summarize(f1);
            s.acc = summarize(acc);
            s.base_f1 = summarize(bf1);
            s.base_acc = summarize(bacc);
            s.f1_runs = f1;
            s.base_f1_runs = bf1;
            rep.cells.push_back(std::move(s));
        }
        if (!units[li].fusion.empty())
            for (std::size_t m = 0; m < 2; ++m) {
                FusionSummary fs;
                fs.noise = noise;
                std::vector<double> f1, acc;
                for (std::size_t r = 0; r < repeats; ++r) {
                    const auto& fr = units[r * levels + li].fusion[m];
                    fs.mode = fr.mode;
                    const double nan = std::nan("");
                    f1.push_back(fr.error ? nan : fr.f1);
                    acc.push_back(fr.error ? nan : fr.acc);
                    fs.streams.push_back(fr.streams);
                    if (fr.error) fs.errors.push_back("repeat " + std::to_string(r) + ": " + *fr.error);
                }
                fs.f1 = summarize(f1);
                fs.acc = summarize(acc);
                fs.f1_runs = f1;
                rep.fusion.push_back(std::move(fs));
            }
    }
    return rep;
}

std::vector<JPoint> j_sweep(const ExperimentConfig& cfg, const std::vector<int>& j_values, SpaceTag space,
                            ClassifierKind kind, double noise, int jobs) {
    cfg.validate();
    if (j_values.empty()) throw ConfigError("j_values must not be empty");
    for (int j : j_values)
        if (j < 1) throw ConfigError("every J must be >= 1");
    ExperimentConfig local = cfg;
    if (std::find(local.feature_spaces.begin(), local.feature_spaces.end(), space) == local.feature_spaces.end())
        local.feature_spaces.push_back(space);
    const auto repeats = static_cast<std::size_t>(cfg.repeats);
    std::vector<std::vector<double>> runs(repeats);
    parallel_for(repeats, jobs, [&](std::size_t r) {
        const Dataset clean = repeat_dataset(local, r);
        const PreparedUnit unit = prepare_unit(local, clean, r, noise);
        const TunedCell tuned = tune_cell(local, unit, space, kind, false);
        for (int j : j_values) {
            const auto run = run_cell_with_budget(local, unit, space, tuned, j);
            if (run.error) throw DataError("J=" + std::to_string(j) + ": " + *run.error);
            runs[r].push_back(run.f1);
        }
    });
    std::vector<JPoint> curve;
    for (std::size_t ji = 0; ji < j_values.size(); ++ji) {
        JPoint p;
        p.j = j_values[ji];
        for (std::size_t r = 0; r < repeats; ++r) p.runs.push_back(runs[r][ji]);
        p.f1 = mean_std(p.runs);
        curve.push_back(std::move(p));
    }
    return curve;
}

}  // namespace prach
