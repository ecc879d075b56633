#pragma once

#include "prach/classifier.hpp"

#include <array>

namespace prach {

class NbModel final : public ModelImpl {
public:
    // Row c of means/variances belongs to class c.
    NbModel(Matrix means, Matrix variances, std::array<double, 2> log_prior)
        : means_(std::move(means)), variances_(std::move(variances)), log_prior_(log_prior) {}

    std::size_t input_dim() const override { return static_cast<std::size_t>(means_.cols()); }
    Posterior posterior(const Matrix& x) const override;
    nlohmann::json state_to_json() const override;
    static std::shared_ptr<const NbModel> from_json(const nlohmann::json& j);

    const Matrix& means() const { return means_; }
    const Matrix& variances() const { return variances_; }
    const std::array<double, 2>& log_prior() const { return log_prior_; }

private:
    Matrix means_;
    Matrix variances_;
    std::array<double, 2> log_prior_;
};

// Per-class mean and (biased) variance plus var_floor; priors from class counts.
std::shared_ptr<const NbModel> fit_nb(const NbParams& p, const Matrix& x, std::span<const Label> y);

}  // namespace prach
