#include "prach/elm.hpp"

#include <cmath>
#include <random>

namespace prach {

ElmWeights elm_random_weights(const ElmParams& p, Eigen::Index input_dim) {
    std::mt19937_64 rng(p.weight_seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ElmWeights w{Matrix(input_dim, p.hidden_units), RowVector(p.hidden_units)};
    for (Eigen::Index i = 0; i < input_dim; ++i)
        for (Eigen::Index j = 0; j < p.hidden_units; ++j) w.weights(i, j) = u(rng);
    for (Eigen::Index j = 0; j < p.hidden_units; ++j) w.bias(j) = u(rng);
    return w;
}

namespace {
Matrix activate(Matrix z, Activation act) {
    if (act == Activation::Sigmoid)
        z = (1.0 + (-z.array()).exp()).inverse().matrix();
    else
        z = z.array().tanh().matrix();
    return z;
}
}  // namespace

Matrix elm_hidden(const ElmWeights& w, Activation act, const Matrix& x) {
    Matrix z = x * w.weights;
    z.rowwise() += w.bias;
    return activate(std::move(z), act);
}

Eigen::MatrixXd elm_gram(const Matrix& h) {
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(h.cols(), h.cols());
    gram.selfadjointView<Eigen::Lower>().rankUpdate(h.transpose());
    return gram.selfadjointView<Eigen::Lower>();
}

double elm_target(Label l) { return l == Label::Peak ? 1.0 : -1.0; }

double elm_peak_posterior(double output) { return 0.5 * (1.0 + std::tanh(output)); }

Vector elm_solve_gram(const Eigen::MatrixXd& gram, const Vector& rhs, double ridge) {
    Eigen::MatrixXd a = gram;
    a.diagonal().array() += ridge;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
    if (ldlt.info() != Eigen::Success) throw NumericError("ELM output solve failed");
    Vector beta = ldlt.solve(rhs);
    if (!beta.allFinite()) throw NumericError("ELM output weights are not finite");
    return beta;
}

Matrix ElmModel::hidden(const Matrix& x) const {
    Matrix z = x * weights_;
    z.rowwise() += bias_;
    return activate(std::move(z), act_);
}

Posterior ElmModel::posterior(const Matrix& x) const {
    const Vector o = output(x);
    Posterior out(x.rows(), 2);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double pp = elm_peak_posterior(o(i));
        out(i, 0) = 1.0 - pp;
        out(i, 1) = pp;
    }
    return out;
}

nlohmann::json ElmModel::state_to_json() const {
    nlohmann::json j;
    j["activation"] = std::string(to_string(act_));
    j["weights"] = matrix_to_json(weights_);
    j["bias"] = std::vector<double>(bias_.data(), bias_.data() + bias_.size());
    j["beta"] = std::vector<double>(beta_.data(), beta_.data() + beta_.size());
    return j;
}

std::shared_ptr<const ElmModel> ElmModel::from_json(const nlohmann::json& j) {
    Matrix w = matrix_from_json(j.at("weights"));
    auto b = j.at("bias").get<std::vector<double>>();
    auto beta = j.at("beta").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(b.size()) != w.cols() || static_cast<Eigen::Index>(beta.size()) != w.cols())
        throw DataError("elm model shape mismatch");
    return std::make_shared<ElmModel>(std::move(w), Eigen::Map<RowVector>(b.data(), w.cols()),
                                      Eigen::Map<Vector>(beta.data(), w.cols()),
                                      parse_activation(j.at("activation").get<std::string>()));
}

std::shared_ptr<const ElmModel> fit_elm(const ElmParams& p, const Matrix& x, std::span<const Label> y) {
    auto w = elm_random_weights(p, x.cols());
    const Matrix h = elm_hidden(w, p.activation, x);
    Vector t(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) t(i) = elm_target(y[static_cast<std::size_t>(i)]);
    Vector beta;
    if (p.ridge > 0.0) {
        const Vector rhs = h.transpose() * t;
        beta = elm_solve_gram(elm_gram(h), rhs, p.ridge);
    } else {
        beta = Eigen::MatrixXd(h).colPivHouseholderQr().solve(t);
        if (!beta.allFinite()) throw NumericError("ELM least-squares solve is not finite");
    }
    return std::make_shared<ElmModel>(std::move(w.weights), std::move(w.bias), std::move(beta), p.activation);
}

}  // namespace prach
