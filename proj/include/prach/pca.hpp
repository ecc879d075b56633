#pragma once

#include "prach/core.hpp"

#include <json.hpp>

namespace prach {

struct PcaModel {
    RowVector mean;          // 1 x d
    Matrix components;       // k x d, orthonormal rows
    Vector eigenvalues;      // k, descending
    double total_variance = 0.0;  // trace of the covariance

    std::size_t input_dim() const { return static_cast<std::size_t>(mean.size()); }
    std::size_t output_dim() const { return static_cast<std::size_t>(components.rows()); }
    double explained_variance_ratio() const;
};

// Top-k eigenvectors of the sample covariance (N-1 denominator). Each
// component's largest-magnitude entry is made positive. Labels are not read.
PcaModel pca_fit(const Matrix& values, int k);
PcaModel pca_fit(const FeatureMatrix& m, int k);

Matrix pca_project(const PcaModel& model, const Matrix& values);
FeatureMatrix pca_project(const PcaModel& model, const FeatureMatrix& m);

nlohmann::json pca_to_json(const PcaModel& model);
PcaModel pca_from_json(const nlohmann::json& j);

}  // namespace prach
