#pragma once

#include "prach/core.hpp"

#include <filesystem>
#include <iosfwd>

namespace prach {

// Column names: raw uses the feature names, PSR uses <feature>_lag<d>
// (input column blocks of width cols/4), PCA uses pc1..pck. Last column is label.
std::vector<std::string> feature_column_names(SpaceTag space, std::size_t cols);

void write_feature_csv(const FeatureMatrix& m, std::ostream& os);
// The space tag is recovered from the header.
FeatureMatrix read_feature_csv(std::istream& is);

void save_feature_matrix(const FeatureMatrix& m, const std::filesystem::path& path);
FeatureMatrix load_feature_matrix(const std::filesystem::path& path);

}  // namespace prach
