#pragma once

#include "prach/core.hpp"

namespace prach {

struct SplitIndices {
    std::vector<std::size_t> train;  // ascending
    std::vector<std::size_t> test;   // ascending
};

// Per class, round(fraction * class size) rows go to train, clamped to leave
// at least one row on each side. Both sides keep the input order.
SplitIndices stratified_split(std::span<const Label> labels, double train_fraction, std::uint64_t seed);

struct DatasetSplit {
    Dataset train;
    Dataset test;
    SplitIndices indices;
};
DatasetSplit stratified_split(const Dataset& ds, double train_fraction, std::uint64_t seed);

// Fold id in [0, folds) per row, dealt round-robin within each shuffled class.
std::vector<int> stratified_folds(std::span<const Label> labels, int folds, std::uint64_t seed);

}  // namespace prach
