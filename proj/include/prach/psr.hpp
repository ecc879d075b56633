#pragma once

#include "prach/core.hpp"

namespace prach {

struct PsrConfig {
    int embed_dim = 7;
    int time_lag = 1;

    void validate() const;
};

// (L - (m-1)*tau) x m trajectory matrix; row i = series[i], series[i+tau], ...
Matrix psr_embed(std::span<const double> series, const PsrConfig& cfg);

// Column-wise delay embedding over row order. Each input column becomes m
// output columns; indices past the end repeat the last value so every row
// keeps its label. Output is rows x (cols*m), column blocks in input order.
FeatureMatrix psr_features(const FeatureMatrix& raw, const PsrConfig& cfg);
FeatureMatrix psr_features(const Dataset& ds, const PsrConfig& cfg);

}  // namespace prach
