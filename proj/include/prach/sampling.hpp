#pragma once

#include "prach/classifier.hpp"
#include "prach/knn.hpp"

#include <iosfwd>

namespace prach {

enum class UncertaintyMode { LeastConfidence, Margin };
std::string_view to_string(UncertaintyMode m);
UncertaintyMode parse_uncertainty_mode(std::string_view s);

struct SamplingConfig {
    double initial_fraction = 0.10;
    int j = 20;          // rows moved per cycle
    int k_density = 5;
    std::uint64_t seed = 0;
    UncertaintyMode uncertainty = UncertaintyMode::LeastConfidence;

    void validate() const;
};

constexpr double kDensityEpsilon = 1e-9;

// 1 / (eps + mean Euclidean distance to the k nearest pool rows).
double knn_density(const RowVector& x, const Matrix& pool, int k);

// Uncertainty in [0,1] from one posterior row: 1 - max posterior scaled by
// 1/0.5, or 1 - |p1 - p0| for Margin (the two agree for two classes).
double uncertainty_from_posterior(double p_false, double p_peak, UncertaintyMode mode = UncertaintyMode::LeastConfidence);
double uncertainty(const TrainedModel& model, const RowVector& x, UncertaintyMode mode = UncertaintyMode::LeastConfidence);

struct ScoredInstance {
    std::size_t row_index = 0;
    double density = 0.0;        // min-max normalized over the pool
    double uncertainty = 0.0;    // min-max normalized over the pool
    double informativeness = 0.0;  // density * uncertainty
    double raw_density = 0.0;
    double raw_uncertainty = 0.0;
};

// Min-max scaling to [0,1]; a constant input maps to all ones.
std::vector<double> minmax_normalize(std::span<const double> v);

// Scores rows, ranks by informativeness descending (lower index first on
// ties) and keeps the first min(budget, n).
std::vector<ScoredInstance> rank_informative(std::span<const double> raw_density,
                                             std::span<const double> raw_uncertainty, std::size_t budget);

// Density of each pool row against the rest of the pool.
std::vector<double> pool_densities(const Matrix& pool, int k);

std::vector<ScoredInstance> select_informative(const FeatureMatrix& pool, const TrainedModel& model,
                                               const SamplingConfig& cfg);

// Pool-relative densities under row removal. Each row caches its nearest
// live neighbours and rescans only when too few remain, so values match a
// from-scratch pool_densities() on the live rows exactly.
class DensityTracker {
public:
    DensityTracker(const Matrix& pool, int k, std::size_t cache = 32);

    void remove(std::span<const std::size_t> rows);
    // Densities of the given live rows, each against all live rows but itself.
    std::vector<double> densities(std::span<const std::size_t> rows);
    std::size_t alive() const { return alive_; }
    std::size_t rescans() const { return rescans_; }

private:
    struct Cache {
        std::vector<Neighbor> list;  // ascending (squared distance, row)
        bool complete = false;       // list held every other live row when built
    };
    void rescan(std::size_t row);
    double density_of(std::size_t row);

    const Matrix* pool_;
    int k_;
    std::size_t cache_;
    std::vector<Cache> caches_;
    std::vector<char> dead_;
    std::size_t alive_;
    std::size_t rescans_ = 0;
};

struct CycleLog {
    std::size_t cycle = 0;
    std::size_t train_size = 0;  // after this cycle's move
    std::vector<std::size_t> moved;  // pool row indices
    std::vector<Label> pseudo_labels;
    std::vector<Label> true_labels;  // for analysis only, never used in training
    double mean_informativeness = 0.0;
};

struct SelfTrainResult {
    TrainedModel model;
    std::vector<CycleLog> cycles;
    std::size_t fits = 0;
};

// Fit, pseudo-label the pool, move the top-J scored rows with their
// predicted labels, repeat until the pool is empty. Pool labels are read
// only into the audit log. A tracker built from the same pool may be passed
// to skip the initial neighbour scan.
SelfTrainResult self_train(const FeatureMatrix& train0, const FeatureMatrix& pool, const ClassifierSpec& spec,
                           const SamplingConfig& cfg, const DensityTracker* tracker = nullptr,
                           bool incremental = true);

std::size_t expected_cycles(std::size_t pool_size, int j);

void write_audit_csv(const std::vector<CycleLog>& cycles, std::ostream& os);

}  // namespace prach
