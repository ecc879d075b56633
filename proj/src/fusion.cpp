#include "prach/fusion.hpp"

#include "prach/dataset_io.hpp"

#include <cmath>
#include <ostream>

namespace prach {

std::string_view to_string(FusionMode m) { return m == FusionMode::WeightedAverage ? "WeightedAverage" : "MetaNb"; }

namespace {
void check_posterior_row(const Eigen::Ref<const RowVector>& p, const char* name) {
    if (p.size() != 2) throw DimensionMismatch(std::string(name) + " posterior must have 2 entries");
    if (!(p(0) >= 0.0 && p(1) >= 0.0) || std::abs(p(0) + p(1) - 1.0) > 1e-6)
        throw DataError(std::string("malformed ") + name + " posterior row");
}
}  // namespace

FusionModel make_weighted(double w_psr, double w_pca) {
    if (!(w_psr >= 0.0 && w_pca >= 0.0) || !(w_psr + w_pca > 0.0) || !std::isfinite(w_psr + w_pca))
        throw ConfigError("fusion weights must be nonnegative with a positive sum");
    const double s = w_psr + w_pca;
    FusionModel m;
    m.mode = FusionMode::WeightedAverage;
    m.w_psr = w_psr / s;
    m.w_pca = w_pca / s;
    return m;
}

Label fuse_weighted(const Eigen::Ref<const RowVector>& p_psr, const Eigen::Ref<const RowVector>& p_pca,
                    double w_psr, double w_pca) {
    check_posterior_row(p_psr, "PSR");
    check_posterior_row(p_pca, "PCA");
    const auto w = make_weighted(w_psr, w_pca);
    const double f = w.w_psr * p_psr(0) + w.w_pca * p_pca(0);
    const double p = w.w_psr * p_psr(1) + w.w_pca * p_pca(1);
    return argmax_label(f, p);
}

FusionModel fit_meta_nb(const Matrix& stream_peak, std::span<const Label> y, double var_floor) {
    if (stream_peak.cols() != 2) throw DimensionMismatch("meta features must have 2 columns");
    check_fit_input(stream_peak, y);
    FusionModel m;
    m.mode = FusionMode::MetaNb;
    m.meta = fit_nb(NbParams{var_floor}, stream_peak, y);
    return m;
}

Label fuse_predict(const FusionModel& model, const Eigen::Ref<const RowVector>& p_psr,
                   const Eigen::Ref<const RowVector>& p_pca) {
    if (model.mode == FusionMode::WeightedAverage) return fuse_weighted(p_psr, p_pca, model.w_psr, model.w_pca);
    if (!model.meta) throw DataError("MetaNb fusion model is not fitted");
    check_posterior_row(p_psr, "PSR");
    check_posterior_row(p_pca, "PCA");
    Matrix x(1, 2);
    x << p_psr(1), p_pca(1);
    const Posterior p = model.meta->posterior(x);
    return argmax_label(p(0, 0), p(0, 1));
}

Matrix stream_features(const Posterior& p_psr, const Posterior& p_pca) {
    if (p_psr.rows() != p_pca.rows()) throw DimensionMismatch("stream posteriors differ in length");
    Matrix x(p_psr.rows(), 2);
    x.col(0) = p_psr.col(1);
    x.col(1) = p_pca.col(1);
    return x;
}

std::vector<Label> fuse_predict_batch(const FusionModel& model, const Posterior& p_psr, const Posterior& p_pca) {
    if (p_psr.rows() != p_pca.rows()) throw DimensionMismatch("stream posteriors differ in length");
    std::vector<Label> out(static_cast<std::size_t>(p_psr.rows()));
    if (model.mode == FusionMode::MetaNb) {
        if (!model.meta) throw DataError("MetaNb fusion model is not fitted");
        for (Eigen::Index i = 0; i < p_psr.rows(); ++i) {
            check_posterior_row(p_psr.row(i), "PSR");
            check_posterior_row(p_pca.row(i), "PCA");
        }
        out = labels_from_posterior(model.meta->posterior(stream_features(p_psr, p_pca)));
        return out;
    }
    for (Eigen::Index i = 0; i < p_psr.rows(); ++i)
        out[static_cast<std::size_t>(i)] = fuse_predict(model, p_psr.row(i), p_pca.row(i));
    return out;
}

void write_fusion_csv(std::ostream& os, const Posterior& p_psr, const Posterior& p_pca,
                      std::span<const Label> weighted, std::span<const Label> meta, std::span<const Label> truth) {
    const auto n = static_cast<std::size_t>(p_psr.rows());
    if (static_cast<std::size_t>(p_pca.rows()) != n || weighted.size() != n || meta.size() != n || truth.size() != n)
        throw DimensionMismatch("fusion export columns differ in length");
    os << "psr_p_false,psr_p_peak,pca_p_false,pca_p_peak,weighted,meta_nb,truth\n";
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        os << format_double(p_psr(r, 0)) << ',' << format_double(p_psr(r, 1)) << ',' << format_double(p_pca(r, 0))
           << ',' << format_double(p_pca(r, 1)) << ',' << to_string(weighted[i]) << ',' << to_string(meta[i]) << ','
           << to_string(truth[i]) << '\n';
    }
}

}  // namespace prach
