#include "prach/pca.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace prach {

namespace {
constexpr double kEigenTol = 1e-10;

Eigen::Index dominant_axis(const Vector& v) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < v.size(); ++i)
        if (std::abs(v(i)) > std::abs(v(best)) + kEigenTol) best = i;
    return best;
}
}  // namespace

double PcaModel::explained_variance_ratio() const {
    return total_variance > 0.0 ? eigenvalues.sum() / total_variance : 0.0;
}

PcaModel pca_fit(const Matrix& values, int k) {
    const auto n = values.rows();
    const auto d = values.cols();
    if (k < 1 || k > d)
        throw ConfigError("PCA needs 1 <= k <= " + std::to_string(d) + ", got " + std::to_string(k));
    if (n < 2) throw DataError("PCA needs at least 2 rows");

    PcaModel model;
    model.mean = values.colwise().mean();
    const Matrix centred = values.rowwise() - model.mean;
    const Eigen::MatrixXd cov = (centred.transpose() * centred) / static_cast<double>(n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) throw NumericError("covariance eigendecomposition failed");

    Vector evals = solver.eigenvalues();
    Eigen::MatrixXd evecs = solver.eigenvectors();
    for (Eigen::Index i = 0; i < d; ++i) {
        Vector v = evecs.col(i);
        if (v(dominant_axis(v)) < 0.0) evecs.col(i) = -v;
        if (evals(i) < 0.0) evals(i) = 0.0;
    }
    std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    // Descending eigenvalue; equal eigenvalues keep the lower dominant axis first.
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        const double scale = std::max({1.0, std::abs(evals(a)), std::abs(evals(b))});
        if (std::abs(evals(a) - evals(b)) > kEigenTol * scale) return evals(a) > evals(b);
        return dominant_axis(evecs.col(a)) < dominant_axis(evecs.col(b));
    });

    model.components.resize(k, d);
    model.eigenvalues.resize(k);
    for (int r = 0; r < k; ++r) {
        const auto c = order[static_cast<std::size_t>(r)];
        model.components.row(r) = evecs.col(c).transpose();
        model.eigenvalues(r) = evals(c);
    }
    model.total_variance = cov.trace();
    return model;
}

PcaModel pca_fit(const FeatureMatrix& m, int k) { return pca_fit(m.values, k); }

Matrix pca_project(const PcaModel& model, const Matrix& values) {
    if (static_cast<std::size_t>(values.cols()) != model.input_dim())
        throw DimensionMismatch("PCA model expects " + std::to_string(model.input_dim()) +
                                " columns, got " + std::to_string(values.cols()));
    return (values.rowwise() - model.mean) * model.components.transpose();
}

FeatureMatrix pca_project(const PcaModel& model, const FeatureMatrix& m) {
    return FeatureMatrix(pca_project(model, m.values), m.labels, SpaceTag::Pca);
}

nlohmann::json pca_to_json(const PcaModel& model) {
    nlohmann::json j;
    j["mean"] = std::vector<double>(model.mean.data(), model.mean.data() + model.mean.size());
    j["eigenvalues"] = std::vector<double>(model.eigenvalues.data(),
                                           model.eigenvalues.data() + model.eigenvalues.size());
    j["components"] = nlohmann::json::array();
    for (Eigen::Index r = 0; r < model.components.rows(); ++r) {
        RowVector row = model.components.row(r);
        j["components"].push_back(std::vector<double>(row.data(), row.data() + row.size()));
    }
    j["total_variance"] = model.total_variance;
    return j;
}

PcaModel pca_from_json(const nlohmann::json& j) {
    try {
        PcaModel m;
        auto mean = j.at("mean").get<std::vector<double>>();
        auto ev = j.at("eigenvalues").get<std::vector<double>>();
        auto comps = j.at("components").get<std::vector<std::vector<double>>>();
        m.mean = Eigen::Map<RowVector>(mean.data(), static_cast<Eigen::Index>(mean.size()));
        m.eigenvalues = Eigen::Map<Vector>(ev.data(), static_cast<Eigen::Index>(ev.size()));
        m.components.resize(static_cast<Eigen::Index>(comps.size()), static_cast<Eigen::Index>(mean.size()));
        for (std::size_t r = 0; r < comps.size(); ++r) {
            if (comps[r].size() != mean.size()) throw DataError("PCA component width mismatch");
            for (std::size_t c = 0; c < mean.size(); ++c)
                m.components(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = comps[r][c];
        }
        m.total_variance = j.value("total_variance", 0.0);
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed PCA model: ") + e.what());
    }
}

}  // namespace prach
