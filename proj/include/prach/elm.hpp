#pragma once

#include "prach/classifier.hpp"

namespace prach {

// Single-hidden-layer network with fixed random input weights and a ridge
// least-squares output layer trained on +1 (Peak) / -1 (FalsePeak) targets.
class ElmModel final : public ModelImpl {
public:
    ElmModel(Matrix weights, RowVector bias, Vector beta, Activation act)
        : weights_(std::move(weights)), bias_(std::move(bias)), beta_(std::move(beta)), act_(act) {}

    std::size_t input_dim() const override { return static_cast<std::size_t>(weights_.rows()); }
    Posterior posterior(const Matrix& x) const override;
    nlohmann::json state_to_json() const override;
    static std::shared_ptr<const ElmModel> from_json(const nlohmann::json& j);

    Matrix hidden(const Matrix& x) const;
    Vector output(const Matrix& x) const { return hidden(x) * beta_; }
    const Vector& beta() const { return beta_; }

private:
    Matrix weights_;  // d x L
    RowVector bias_;  // 1 x L
    Vector beta_;     // L
    Activation act_;
};

struct ElmWeights {
    Matrix weights;  // d x L, U[-1,1]
    RowVector bias;  // 1 x L, U[-1,1]
};

// Draws weights row by row, then biases, from weight_seed.
ElmWeights elm_random_weights(const ElmParams& p, Eigen::Index input_dim);
Matrix elm_hidden(const ElmWeights& w, Activation act, const Matrix& x);
// H'H, full symmetric.
Eigen::MatrixXd elm_gram(const Matrix& h);
double elm_target(Label l);
// Output -> P(Peak) = (1 + tanh(o)) / 2.
double elm_peak_posterior(double output);
// Solves (G + ridge*I) beta = rhs where G = H'H; ridge must be > 0.
Vector elm_solve_gram(const Eigen::MatrixXd& gram, const Vector& rhs, double ridge);

std::shared_ptr<const ElmModel> fit_elm(const ElmParams& p, const Matrix& x, std::span<const Label> y);

}  // namespace prach
