#include "prach/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace prach {

void NoiseSpec::validate() const {
    if (!(fraction >= 0.0 && fraction <= 1.0))
        throw ConfigError("noise fraction must lie in [0,1], got " + std::to_string(fraction));
}

double mean_power(const Dataset& ds) {
    if (ds.empty()) throw DataError("mean_power of an empty dataset");
    double sum = 0.0;
    for (const auto& r : ds.records())
        for (int j = 0; j < kNumFeatures; ++j) sum += r.feature(j) * r.feature(j);
    return sum / (static_cast<double>(ds.size()) * kNumFeatures);
}

std::size_t corrupted_count(std::size_t n, double fraction) {
    return static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
}

std::vector<std::size_t> corrupted_rows(std::size_t n, const NoiseSpec& spec) {
    spec.validate();
    const std::size_t m = corrupted_count(n, spec.fraction);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::mt19937_64 rng(derive_seed(spec.seed, {hash_tag("rows")}));
    // Partial Fisher-Yates: the first m slots are a uniform sample.
    for (std::size_t i = 0; i < m; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(m);
    std::sort(idx.begin(), idx.end());
    return idx;
}

Dataset inject(const Dataset& ds, const NoiseSpec& spec) {
    spec.validate();
    std::vector<FeatureRecord> out(ds.records().begin(), ds.records().end());
    const auto rows = corrupted_rows(ds.size(), spec);
    NoiseProvenance np{spec.mode, spec.fraction, spec.seed, 0.0, rows.size()};
    if (spec.mode == NoiseMode::FeatureAwgn) {
        const double sigma = ds.empty() ? 0.0 : std::sqrt(mean_power(ds));
        np.sigma = sigma;
        std::mt19937_64 rng(derive_seed(spec.seed, {hash_tag("awgn")}));
        std::normal_distribution<double> gauss(0.0, sigma > 0.0 ? sigma : 1.0);
        for (auto i : rows)
            for (int j = 0; j < kNumFeatures; ++j) {
                const double e = gauss(rng);
                if (sigma > 0.0) out[i].feature(j) += e;
            }
    } else {
        for (auto i : rows) out[i].label = toggled(out[i].label);
    }
    Provenance prov = ds.provenance();
    prov.noise.push_back(np);
    return Dataset(std::move(out), std::move(prov));
}

}  // namespace prach
