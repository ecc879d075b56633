#include "prach/psr.hpp"

#include <algorithm>

namespace prach {

void PsrConfig::validate() const {
    if (embed_dim < 1) throw ConfigError("PSR embed_dim must be >= 1");
    if (time_lag < 1) throw ConfigError("PSR time_lag must be >= 1");
}

Matrix psr_embed(std::span<const double> series, const PsrConfig& cfg) {
    cfg.validate();
    const auto span = static_cast<std::size_t>(cfg.embed_dim - 1) * static_cast<std::size_t>(cfg.time_lag);
    if (series.size() < span + 1)
        throw DataError("series of length " + std::to_string(series.size()) +
                        " is too short for the delay embedding");
    const auto rows = series.size() - span;
    Matrix out(static_cast<Eigen::Index>(rows), cfg.embed_dim);
    for (std::size_t i = 0; i < rows; ++i)
        for (int d = 0; d < cfg.embed_dim; ++d)
            out(static_cast<Eigen::Index>(i), d) = series[i + static_cast<std::size_t>(d * cfg.time_lag)];
    return out;
}

FeatureMatrix psr_features(const FeatureMatrix& raw, const PsrConfig& cfg) {
    cfg.validate();
    if (raw.rows() == 0) throw DataError("PSR of an empty matrix");
    const auto n = raw.values.rows();
    const auto d = raw.values.cols();
    const int m = cfg.embed_dim;
    Matrix out(n, d * m);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            for (int k = 0; k < m; ++k) {
                const auto src = std::min<Eigen::Index>(i + static_cast<Eigen::Index>(k) * cfg.time_lag, n - 1);
                out(i, j * m + k) = raw.values(src, j);
            }
    return FeatureMatrix(std::move(out), raw.labels, SpaceTag::Psr);
}

FeatureMatrix psr_features(const Dataset& ds, const PsrConfig& cfg) {
    return psr_features(raw_matrix(ds), cfg);
}

}  // namespace prach
