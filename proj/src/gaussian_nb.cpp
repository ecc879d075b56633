#include "prach/gaussian_nb.hpp"

#include <cmath>
#include <numbers>

namespace prach {

std::shared_ptr<const NbModel> fit_nb(const NbParams& p, const Matrix& x, std::span<const Label> y) {
    const auto d = x.cols();
    Matrix means = Matrix::Zero(2, d);
    Matrix vars = Matrix::Zero(2, d);
    std::array<double, 2> count{0.0, 0.0};
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const int c = class_index(y[static_cast<std::size_t>(i)]);
        means.row(c) += x.row(i);
        count[static_cast<std::size_t>(c)] += 1.0;
    }
    if (count[0] == 0.0 || count[1] == 0.0) throw DegenerateInput("Gaussian NB needs both classes in training data");
    for (int c = 0; c < 2; ++c) means.row(c) /= count[static_cast<std::size_t>(c)];
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const int c = class_index(y[static_cast<std::size_t>(i)]);
        vars.row(c) += (x.row(i) - means.row(c)).array().square().matrix();
    }
    for (int c = 0; c < 2; ++c) vars.row(c) /= count[static_cast<std::size_t>(c)];
    vars.array() += p.var_floor;
    if ((vars.array() <= 0.0).any()) throw NumericError("Gaussian NB variance is zero; raise var_floor");
    const double n = count[0] + count[1];
    return std::make_shared<NbModel>(std::move(means), std::move(vars),
                                     std::array<double, 2>{std::log(count[0] / n), std::log(count[1] / n)});
}

Posterior NbModel::posterior(const Matrix& x) const {
    Posterior out(x.rows(), 2);
    const double log2pi = std::log(2.0 * std::numbers::pi);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        std::array<double, 2> lj{};
        for (int c = 0; c < 2; ++c) {
            double s = log_prior_[static_cast<std::size_t>(c)];
            for (Eigen::Index j = 0; j < x.cols(); ++j) {
                const double v = variances_(c, j);
                const double t = x(i, j) - means_(c, j);
                s -= 0.5 * (log2pi + std::log(v) + t * t / v);
            }
            lj[static_cast<std::size_t>(c)] = s;
        }
        const double m = std::max(lj[0], lj[1]);
        const double e0 = std::exp(lj[0] - m);
        const double e1 = std::exp(lj[1] - m);
        out(i, 0) = e0 / (e0 + e1);
        out(i, 1) = e1 / (e0 + e1);
    }
    return out;
}

nlohmann::json NbModel::state_to_json() const {
    nlohmann::json j;
    j["means"] = matrix_to_json(means_);
    j["variances"] = matrix_to_json(variances_);
    j["log_prior"] = {log_prior_[0], log_prior_[1]};
    return j;
}

std::shared_ptr<const NbModel> NbModel::from_json(const nlohmann::json& j) {
    Matrix m = matrix_from_json(j.at("means"));
    Matrix v = matrix_from_json(j.at("variances"));
    if (m.rows() != 2 || v.rows() != 2 || m.cols() != v.cols()) throw DataError("nb model shape mismatch");
    const auto& lp = j.at("log_prior");
    return std::make_shared<NbModel>(std::move(m), std::move(v),
                                     std::array<double, 2>{lp.at(0).get<double>(), lp.at(1).get<double>()});
}

}  // namespace prach
