#include "prach/core.hpp"

namespace prach {

Label parse_label(std::string_view s) {
    if (s == "Peak") return Label::Peak;
    if (s == "FalsePeak") return Label::FalsePeak;
    throw DataError("unknown label '" + std::string(s) + "'");
}

double FeatureRecord::feature(int j) const {
    switch (j) {
        case 0: return amplitude;
        case 1: return variance;
        case 2: return threshold;
        case 3: return snr;
    }
    throw std::out_of_range("feature index");
}

double& FeatureRecord::feature(int j) {
    switch (j) {
        case 0: return amplitude;
        case 1: return variance;
        case 2: return threshold;
        case 3: return snr;
    }
    throw std::out_of_range("feature index");
}

std::string_view to_string(NoiseMode m) {
    return m == NoiseMode::FeatureAwgn ? "awgn" : "flip";
}

NoiseMode parse_noise_mode(std::string_view s) {
    if (s == "awgn" || s == "FeatureAwgn") return NoiseMode::FeatureAwgn;
    if (s == "flip" || s == "LabelFlip") return NoiseMode::LabelFlip;
    throw ConfigError("unknown noise mode '" + std::string(s) + "'");
}

std::size_t Dataset::count(Label l) const {
    std::size_t n = 0;
    for (const auto& r : records_) n += (r.label == l);
    return n;
}

std::vector<Label> Dataset::labels() const {
    std::vector<Label> out;
    out.reserve(records_.size());
    for (const auto& r : records_) out.push_back(r.label);
    return out;
}

Matrix Dataset::features() const {
    Matrix m(static_cast<Eigen::Index>(records_.size()), kNumFeatures);
    for (std::size_t i = 0; i < records_.size(); ++i)
        for (int j = 0; j < kNumFeatures; ++j)
            m(static_cast<Eigen::Index>(i), j) = records_[i].feature(j);
    return m;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
    std::vector<FeatureRecord> out;
    out.reserve(rows.size());
    for (auto i : rows) out.push_back(records_.at(i));
    return Dataset(std::move(out), provenance_);
}

std::string_view to_string(SpaceTag s) {
    switch (s) {
        case SpaceTag::Raw: return "Raw";
        case SpaceTag::Psr: return "Psr";
        case SpaceTag::Pca: return "Pca";
    }
    return "?";
}

SpaceTag parse_space(std::string_view s) {
    if (s == "Raw" || s == "raw") return SpaceTag::Raw;
    if (s == "Psr" || s == "psr" || s == "PSR") return SpaceTag::Psr;
    if (s == "Pca" || s == "pca" || s == "PCA") return SpaceTag::Pca;
    throw ConfigError("unknown feature space '" + std::string(s) + "'");
}

FeatureMatrix::FeatureMatrix(Matrix v, std::vector<Label> l, SpaceTag s)
    : values(std::move(v)), labels(std::move(l)), space(s) {
    if (static_cast<std::size_t>(values.rows()) != labels.size())
        throw DimensionMismatch("feature matrix has " + std::to_string(values.rows()) +
                                " rows but " + std::to_string(labels.size()) + " labels");
}

FeatureMatrix FeatureMatrix::subset(std::span<const std::size_t> rows) const {
    Matrix v(static_cast<Eigen::Index>(rows.size()), values.cols());
    std::vector<Label> l;
    l.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        v.row(static_cast<Eigen::Index>(i)) = values.row(static_cast<Eigen::Index>(rows[i]));
        l.push_back(labels.at(rows[i]));
    }
    return FeatureMatrix(std::move(v), std::move(l), space);
}

FeatureMatrix raw_matrix(const Dataset& ds) {
    return FeatureMatrix(ds.features(), ds.labels(), SpaceTag::Raw);
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts) {
    std::uint64_t s = splitmix64(base);
    for (auto p : parts) s = splitmix64(s ^ splitmix64(p + 0x632be59bd9b4e019ULL));
    return s;
}

std::uint64_t hash_tag(std::string_view tag) {
    // FNV-1a
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : tag) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace prach
