#pragma once

#include "prach/classifier.hpp"

namespace prach {

inline double squared_distance(const double* a, const double* b, Eigen::Index d) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
        const double t = a[j] - b[j];
        s += t * t;
    }
    return s;
}

struct Neighbor {
    double dist;
    std::uint32_t index;
    friend bool operator<(const Neighbor& a, const Neighbor& b) {
        return a.dist < b.dist || (a.dist == b.dist && a.index < b.index);
    }
};

// Inserts into an ascending list capped at k entries.
void push_neighbor(std::vector<Neighbor>& top, Neighbor cand, std::size_t k);

// k nearest rows of `ref` to `query` by squared distance, ascending (distance, index).
std::vector<Neighbor> nearest_rows(const Matrix& ref, const double* query, std::size_t k);

// Laplace-smoothed vote: P(Peak) = (peaks + 1) / (k + 2).
double knn_peak_posterior(std::size_t peaks, std::size_t k);

class KnnModel final : public ModelImpl {
public:
    KnnModel(Matrix train, std::vector<Label> labels, int k)
        : train_(std::move(train)), labels_(std::move(labels)), k_(k) {}

    std::size_t input_dim() const override { return static_cast<std::size_t>(train_.cols()); }
    Posterior posterior(const Matrix& x) const override;
    nlohmann::json state_to_json() const override;
    static std::shared_ptr<const KnnModel> from_json(const nlohmann::json& j);

    std::size_t effective_k() const { return std::min<std::size_t>(static_cast<std::size_t>(k_), labels_.size()); }

private:
    Matrix train_;
    std::vector<Label> labels_;
    int k_;
};

std::shared_ptr<const KnnModel> fit_knn(const KnnParams& p, const Matrix& x, std::span<const Label> y);

}  // namespace prach
