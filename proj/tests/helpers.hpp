#pragma once

#include "prach/core.hpp"

#include <doctest.h>

#include <filesystem>
#include <random>

namespace testutil {

inline std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("prach_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

// Two Gaussian blobs in d dimensions; class 1 centred at `gap` on every axis.
inline prach::FeatureMatrix blobs(std::size_t n0, std::size_t n1, int d, double gap, double sd, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, sd);
    prach::Matrix x(static_cast<Eigen::Index>(n0 + n1), d);
    std::vector<prach::Label> y;
    for (std::size_t i = 0; i < n0 + n1; ++i) {
        const bool peak = i >= n0;
        for (int j = 0; j < d; ++j) x(static_cast<Eigen::Index>(i), j) = (peak ? gap : 0.0) + g(rng);
        y.push_back(peak ? prach::Label::Peak : prach::Label::FalsePeak);
    }
    return prach::FeatureMatrix(std::move(x), std::move(y), prach::SpaceTag::Raw);
}

}  // namespace testutil
