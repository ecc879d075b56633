#pragma once

#include "prach/core.hpp"

namespace prach {

struct Confusion {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;
};

// Peak is the positive class.
Confusion confusion(std::span<const Label> truth, std::span<const Label> pred);
// 2PR/(P+R), 0 when P+R = 0.
double f1_score(std::span<const Label> truth, std::span<const Label> pred);
double f1_score(const Confusion& c);
double accuracy(std::span<const Label> truth, std::span<const Label> pred);

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation, 0 for a single value
};
MeanStd mean_std(std::span<const double> values);

}  // namespace prach
