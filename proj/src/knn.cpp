#include "prach/knn.hpp"

#include <algorithm>

namespace prach {

void push_neighbor(std::vector<Neighbor>& top, Neighbor cand, std::size_t k) {
    if (top.size() == k) {
        if (!(cand < top.back())) return;
        top.pop_back();
    }
    top.insert(std::upper_bound(top.begin(), top.end(), cand), cand);
}

std::vector<Neighbor> nearest_rows(const Matrix& ref, const double* query, std::size_t k) {
    std::vector<Neighbor> top;
    top.reserve(k + 1);
    if (k == 0) return top;
    const auto d = ref.cols();
    for (Eigen::Index i = 0; i < ref.rows(); ++i)
        push_neighbor(top, {squared_distance(ref.row(i).data(), query, d), static_cast<std::uint32_t>(i)}, k);
    return top;
}

double knn_peak_posterior(std::size_t peaks, std::size_t k) {
    return (static_cast<double>(peaks) + 1.0) / (static_cast<double>(k) + 2.0);
}

Posterior KnnModel::posterior(const Matrix& x) const {
    const std::size_t k = effective_k();
    Posterior out(x.rows(), 2);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const RowVector q = x.row(i);
        std::size_t peaks = 0;
        for (const auto& nb : nearest_rows(train_, q.data(), k)) peaks += labels_[nb.index] == Label::Peak;
        const double pp = knn_peak_posterior(peaks, k);
        out(i, 0) = 1.0 - pp;
        out(i, 1) = pp;
    }
    return out;
}

nlohmann::json KnnModel::state_to_json() const {
    nlohmann::json j;
    j["k"] = k_;
    j["train"] = matrix_to_json(train_);
    std::vector<int> y;
    for (auto l : labels_) y.push_back(class_index(l));
    j["labels"] = y;
    return j;
}

std::shared_ptr<const KnnModel> KnnModel::from_json(const nlohmann::json& j) {
    Matrix train = matrix_from_json(j.at("train"));
    std::vector<Label> labels;
    for (int v : j.at("labels").get<std::vector<int>>()) labels.push_back(v ? Label::Peak : Label::FalsePeak);
    if (static_cast<Eigen::Index>(labels.size()) != train.rows()) throw DataError("knn label count mismatch");
    return std::make_shared<KnnModel>(std::move(train), std::move(labels), j.at("k").get<int>());
}

std::shared_ptr<const KnnModel> fit_knn(const KnnParams& p, const Matrix& x, std::span<const Label> y) {
    return std::make_shared<KnnModel>(x, std::vector<Label>(y.begin(), y.end()), p.k);
}

}  // namespace prach
