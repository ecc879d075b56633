#pragma once

#include "prach/classifier.hpp"
#include "prach/fusion.hpp"
#include "prach/generator.hpp"
#include "prach/metrics.hpp"
#include "prach/psr.hpp"
#include "prach/sampling.hpp"
#include "prach/split.hpp"

#include <map>
#include <optional>

namespace prach {

struct ExperimentConfig {
    GenConfig gen;  // gen.seed is replaced per repeat by a seed derived from master_seed
    std::vector<double> noise_levels{0.0, 0.05, 0.10, 0.15};
    NoiseMode noise_mode = NoiseMode::FeatureAwgn;
    std::vector<ClassifierKind> classifiers{ClassifierKind::DecisionTree, ClassifierKind::Knn, ClassifierKind::Elm,
                                            ClassifierKind::GaussianNb};
    std::vector<SpaceTag> feature_spaces{SpaceTag::Psr, SpaceTag::Pca};
    SamplingConfig sampling;
    PsrConfig psr;
    int pca_k = 2;
    int repeats = 5;
    double split = 0.70;
    std::uint64_t master_seed = 1;
    int tune_folds = 3;
    bool fusion = true;
    // Optional per-kind replacement for the default tuning grid.
    std::map<ClassifierKind, std::vector<ClassifierSpec>> grids;

    void validate() const;
};

// Everything one (repeat, noise level) unit needs, built from the master seed.
struct PreparedUnit {
    std::size_t repeat = 0;
    double noise = 0.0;
    Dataset noisy;
    SplitIndices split;
    SplitIndices initial;  // indices into the training split: initial set / pool
    std::map<SpaceTag, FeatureMatrix> train, test, train0, pool;
    std::map<SpaceTag, DensityTracker> trackers;
    std::map<std::string, std::uint64_t> seeds;

    PreparedUnit() = default;
    PreparedUnit(const PreparedUnit&) = delete;
    PreparedUnit& operator=(const PreparedUnit&) = delete;
    PreparedUnit(PreparedUnit&&) = default;
    PreparedUnit& operator=(PreparedUnit&&) = default;
};

std::uint64_t repeat_gen_seed(const ExperimentConfig& cfg, std::size_t repeat);
std::uint64_t noise_key(double level);
std::uint64_t cell_seed(const ExperimentConfig& cfg, std::string_view tag, std::size_t repeat, double noise,
                        std::uint64_t extra = 0);

Dataset repeat_dataset(const ExperimentConfig& cfg, std::size_t repeat);
// A dataset that already records a matching injection is not corrupted again.
PreparedUnit prepare_unit(const ExperimentConfig& cfg, const Dataset& clean, std::size_t repeat, double noise);

// The self-training learner is tuned on the labeled initial set only; the
// baseline is tuned on the whole training split.
struct TunedCell {
    ClassifierSpec spec;
    double cv_f1 = 0.0;
    ClassifierSpec base_spec;
    double base_cv_f1 = 0.0;
    std::uint64_t seed = 0;
};
TunedCell tune_cell(const ExperimentConfig& cfg, const PreparedUnit& unit, SpaceTag space, ClassifierKind kind,
                    bool baseline = true);

struct CellRun {
    SpaceTag space = SpaceTag::Psr;
    ClassifierKind kind = ClassifierKind::Elm;
    TunedCell tuned;
    double f1 = 0.0;  // self-trained model on the test split
    double acc = 0.0;
    double base_f1 = 0.0;  // baseline spec fit on the whole training split
    double base_acc = 0.0;
    std::size_t cycles = 0;
    std::size_t pseudo_label_errors = 0;
    std::optional<std::string> error;
    std::optional<TrainedModel> model;
    std::optional<Posterior> test_posterior;
};

CellRun run_cell(const ExperimentConfig& cfg, const PreparedUnit& unit, SpaceTag space, ClassifierKind kind,
                 bool baseline = true);
// Self-training only, with a caller-chosen budget; used by the J sweep.
CellRun run_cell_with_budget(const ExperimentConfig& cfg, const PreparedUnit& unit, SpaceTag space,
                             const TunedCell& tuned, int j);

struct FusionRun {
    FusionMode mode = FusionMode::WeightedAverage;
    double f1 = 0.0;
    double acc = 0.0;
    std::string streams;  // chosen classifier per space
    double w_psr = 0.0;
    double w_pca = 0.0;
    std::optional<std::string> error;
};

// Every cell is self-trained 2-fold on the training split to get out-of-fold
// posteriors. The best PSR and best PCA cell by out-of-fold F1 are fused; the
// weights are those F1 scores and the meta learner fits their posteriors.
std::vector<FusionRun> run_fusion(const ExperimentConfig& cfg, const PreparedUnit& unit,
                                  const std::vector<CellRun>& cells);

struct UnitResult {
    std::size_t repeat = 0;
    double noise = 0.0;
    std::vector<CellRun> cells;
    std::vector<FusionRun> fusion;
    std::map<std::string, std::uint64_t> seeds;
};

UnitResult run_unit(const ExperimentConfig& cfg, const Dataset& clean, std::size_t repeat, double noise);

struct CellSummary {
    SpaceTag space = SpaceTag::Psr;
    ClassifierKind kind = ClassifierKind::Elm;
    double noise = 0.0;
    MeanStd f1, acc, base_f1, base_acc;
    std::vector<double> f1_runs, base_f1_runs;
    std::vector<std::string> specs, base_specs;
    std::vector<std::uint64_t> seeds;
    std::vector<std::string> errors;
};

struct FusionSummary {
    FusionMode mode = FusionMode::WeightedAverage;
    double noise = 0.0;
    MeanStd f1, acc;
    std::vector<double> f1_runs;
    std::vector<std::string> streams;
    std::vector<std::string> errors;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<CellSummary> cells;
    std::vector<FusionSummary> fusion;
    std::map<std::string, std::uint64_t> seeds;  // "r<repeat>/n<noise>/<tag>"

    const CellSummary& cell(SpaceTag space, ClassifierKind kind, double noise) const;
    const FusionSummary& fusion_row(FusionMode mode, double noise) const;
};

// jobs caps the number of (repeat, noise) units run concurrently.
ExperimentReport run_experiment(const ExperimentConfig& cfg, int jobs = 1);
// Same, on caller-supplied datasets (one per repeat) instead of generated ones.
// A dataset whose provenance records one injection at the single configured
// noise level is used without injecting again.
ExperimentReport run_experiment_on(const ExperimentConfig& cfg, const std::vector<Dataset>& clean, int jobs = 1);

struct JPoint {
    int j = 0;
    MeanStd f1;
    std::vector<double> runs;
};

std::vector<JPoint> j_sweep(const ExperimentConfig& cfg, const std::vector<int>& j_values,
                            SpaceTag space = SpaceTag::Psr, ClassifierKind kind = ClassifierKind::Elm,
                            double noise = 0.15, int jobs = 1);

}  // namespace prach
