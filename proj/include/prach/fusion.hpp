#pragma once

#include "prach/gaussian_nb.hpp"

#include <iosfwd>

namespace prach {

enum class FusionMode { WeightedAverage, MetaNb };
std::string_view to_string(FusionMode m);

struct FusionModel {
    FusionMode mode = FusionMode::WeightedAverage;
    double w_psr = 0.5;
    double w_pca = 0.5;
    std::shared_ptr<const NbModel> meta;  // MetaNb only
};

// Normalizes the pair to sum to 1; both must be >= 0 with a positive sum.
FusionModel make_weighted(double w_psr, double w_pca);

// argmax of w_psr * p_psr + w_pca * p_pca, ties to FalsePeak.
Label fuse_weighted(const Eigen::Ref<const RowVector>& p_psr, const Eigen::Ref<const RowVector>& p_pca,
                    double w_psr, double w_pca);

// Gaussian NB over (P(Peak) from the PSR stream, P(Peak) from the PCA stream).
FusionModel fit_meta_nb(const Matrix& stream_peak, std::span<const Label> y, double var_floor = 1e-9);

Label fuse_predict(const FusionModel& model, const Eigen::Ref<const RowVector>& p_psr,
                   const Eigen::Ref<const RowVector>& p_pca);
std::vector<Label> fuse_predict_batch(const FusionModel& model, const Posterior& p_psr, const Posterior& p_pca);

// Stacks the two streams' Peak posteriors into an N x 2 meta-feature matrix.
Matrix stream_features(const Posterior& p_psr, const Posterior& p_pca);

// Audit export: both stream posteriors, each fused decision, and the truth.
void write_fusion_csv(std::ostream& os, const Posterior& p_psr, const Posterior& p_pca,
                      std::span<const Label> weighted, std::span<const Label> meta, std::span<const Label> truth);

}  // namespace prach
