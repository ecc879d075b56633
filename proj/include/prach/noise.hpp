#pragma once

#include "prach/core.hpp"

namespace prach {

struct NoiseSpec {
    double fraction = 0.0;
    NoiseMode mode = NoiseMode::FeatureAwgn;
    std::uint64_t seed = 0;

    void validate() const;
};

// Mean of value^2 over every record and all four features.
double mean_power(const Dataset& ds);

std::size_t corrupted_count(std::size_t n, double fraction);

// Rows that inject() corrupts for this spec, ascending.
std::vector<std::size_t> corrupted_rows(std::size_t n, const NoiseSpec& spec);

// FeatureAwgn adds N(0, mean_power) to every feature of the chosen rows;
// LabelFlip toggles their labels. Untouched rows are copied bit for bit.
Dataset inject(const Dataset& ds, const NoiseSpec& spec);

}  // namespace prach
