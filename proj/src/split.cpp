#include "prach/split.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

namespace prach {

namespace {
std::array<std::vector<std::size_t>, 2> shuffled_classes(std::span<const Label> labels, std::uint64_t seed) {
    std::array<std::vector<std::size_t>, 2> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[static_cast<std::size_t>(class_index(labels[i]))].push_back(i);
    for (int c = 0; c < 2; ++c) {
        std::mt19937_64 rng(derive_seed(seed, {static_cast<std::uint64_t>(c)}));
        std::shuffle(by_class[static_cast<std::size_t>(c)].begin(), by_class[static_cast<std::size_t>(c)].end(), rng);
    }
    return by_class;
}
}  // namespace

SplitIndices stratified_split(std::span<const Label> labels, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw ConfigError("train fraction must lie in (0,1)");
    auto by_class = shuffled_classes(labels, seed);
    SplitIndices out;
    for (int c = 0; c < 2; ++c) {
        const auto& idx = by_class[static_cast<std::size_t>(c)];
        if (idx.size() < 2)
            throw DataError("class " + std::string(to_string(static_cast<Label>(c))) + " has " +
                            std::to_string(idx.size()) + " rows; a stratified split needs at least 2");
        auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(idx.size())));
        n_train = std::clamp<std::size_t>(n_train, 1, idx.size() - 1);
        out.train.insert(out.train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
        out.test.insert(out.test.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

DatasetSplit stratified_split(const Dataset& ds, double train_fraction, std::uint64_t seed) {
    const auto labels = ds.labels();
    auto idx = stratified_split(labels, train_fraction, seed);
    return {ds.subset(idx.train), ds.subset(idx.test), std::move(idx)};
}

std::vector<int> stratified_folds(std::span<const Label> labels, int folds, std::uint64_t seed) {
    if (folds < 2) throw ConfigError("need at least 2 folds");
    auto by_class = shuffled_classes(labels, seed);
    std::vector<int> fold(labels.size(), 0);
    int next = 0;
    for (const auto& idx : by_class)
        for (auto i : idx) {
            fold[i] = next;
            next = (next + 1) % folds;
        }
    return fold;
}

}  // namespace prach
