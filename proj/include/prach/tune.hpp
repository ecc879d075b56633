#pragma once

#include "prach/classifier.hpp"

namespace prach {

// Stand-in search grids: tree max_depth {3,5,10,unbounded}; knn k {1,3,5,11};
// elm hidden {32,128,512} x ridge {1e-5,1e-3,1e-1}; nb var_floor {1e-9}.
std::vector<ClassifierSpec> default_grid(ClassifierKind kind, std::uint64_t weight_seed = 1);

struct TuneResult {
    ClassifierSpec best;
    double best_score = 0.0;
    std::vector<double> scores;  // mean CV F1 per grid point; NaN where fitting failed
};

// Stratified k-fold CV; the grid point with the highest mean F1 wins, earlier
// points win ties. Each fold model is scored only on rows it did not see.
TuneResult tune(const std::vector<ClassifierSpec>& grid, const Matrix& x, std::span<const Label> y, int folds,
                std::uint64_t seed);
TuneResult tune(const std::vector<ClassifierSpec>& grid, const FeatureMatrix& m, int folds, std::uint64_t seed);

}  // namespace prach
