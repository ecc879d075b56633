#pragma once

#include "prach/classifier.hpp"

namespace prach {

// CART with Gini impurity. Splits send x[feature] <= threshold left.
class TreeModel final : public ModelImpl {
public:
    struct Node {
        int feature = -1;  // -1 marks a leaf
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        double p_peak = 0.0;  // leaf class frequency
    };

    TreeModel(std::size_t dim, std::vector<Node> nodes) : dim_(dim), nodes_(std::move(nodes)) {}

    std::size_t input_dim() const override { return dim_; }
    Posterior posterior(const Matrix& x) const override;
    nlohmann::json state_to_json() const override;
    static std::shared_ptr<const TreeModel> from_json(const nlohmann::json& j);

    const std::vector<Node>& nodes() const { return nodes_; }
    int depth() const;
    std::size_t leaf_count() const;

private:
    double leaf_value(const Eigen::Ref<const RowVector>& row) const;
    std::size_t dim_;
    std::vector<Node> nodes_;
};

std::shared_ptr<const TreeModel> fit_tree(const TreeParams& p, const Matrix& x, std::span<const Label> y);

// Row indices per feature, stably sorted by value. Rows of x past the first
// y.size() are ignored by the fit below.
using TreeSortOrder = std::vector<std::vector<std::uint32_t>>;
TreeSortOrder tree_sort_order(const Matrix& x, std::size_t rows);
// Adds rows [old_rows, new_rows) to an order built over the first old_rows rows.
void tree_sort_extend(TreeSortOrder& sorted, const Matrix& x, std::size_t old_rows, std::size_t new_rows);
std::shared_ptr<const TreeModel> fit_tree_sorted(const TreeParams& p, const Matrix& x, std::span<const Label> y,
                                                 TreeSortOrder sorted);

}  // namespace prach
