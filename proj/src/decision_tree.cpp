#include "prach/decision_tree.hpp"

#include <algorithm>
#include <numeric>

namespace prach {

namespace {

// n * gini for a node with `peaks` positives out of n.
double weighted_gini(double n, double peaks) {
    if (n <= 0.0) return 0.0;
    const double neg = n - peaks;
    return n - (peaks * peaks + neg * neg) / n;
}

struct Frame {
    int node;
    std::size_t begin;
    std::size_t end;
    int depth;
};

void check_tree_input(std::span<const Label> y) {
    bool has_peak = false;
    bool has_false = false;
    for (auto l : y) (l == Label::Peak ? has_peak : has_false) = true;
    if (!(has_peak && has_false)) throw DegenerateInput("decision tree needs both classes in training data");
}

}  // namespace

TreeSortOrder tree_sort_order(const Matrix& x, std::size_t rows) {
    TreeSortOrder sorted(static_cast<std::size_t>(x.cols()), std::vector<std::uint32_t>(rows));
    for (std::size_t f = 0; f < sorted.size(); ++f) {
        auto& s = sorted[f];
        std::iota(s.begin(), s.end(), 0u);
        const auto col = static_cast<Eigen::Index>(f);
        std::stable_sort(s.begin(), s.end(), [&](std::uint32_t a, std::uint32_t b) {
            return x(static_cast<Eigen::Index>(a), col) < x(static_cast<Eigen::Index>(b), col);
        });
    }
    return sorted;
}

void tree_sort_extend(TreeSortOrder& sorted, const Matrix& x, std::size_t old_rows, std::size_t new_rows) {
    std::vector<std::uint32_t> fresh(new_rows - old_rows), merged;
    for (std::size_t f = 0; f < sorted.size(); ++f) {
        const auto col = static_cast<Eigen::Index>(f);
        auto less = [&](std::uint32_t a, std::uint32_t b) {
            return x(static_cast<Eigen::Index>(a), col) < x(static_cast<Eigen::Index>(b), col);
        };
        std::iota(fresh.begin(), fresh.end(), static_cast<std::uint32_t>(old_rows));
        std::stable_sort(fresh.begin(), fresh.end(), less);
        // Older rows have smaller indices, so taking them first on ties
        // reproduces a stable sort of the whole column.
        merged.resize(new_rows);
        std::merge(sorted[f].begin(), sorted[f].end(), fresh.begin(), fresh.end(), merged.begin(), less);
        sorted[f].swap(merged);
    }
}

std::shared_ptr<const TreeModel> fit_tree(const TreeParams& p, const Matrix& x, std::span<const Label> y) {
    check_tree_input(y);
    return fit_tree_sorted(p, x, y, tree_sort_order(x, y.size()));
}

std::shared_ptr<const TreeModel> fit_tree_sorted(const TreeParams& p, const Matrix& x, std::span<const Label> y,
                                                 TreeSortOrder sorted) {
    check_tree_input(y);
    const auto n = y.size();
    const auto d = static_cast<std::size_t>(x.cols());
    std::vector<char> is_peak(n);
    for (std::size_t i = 0; i < n; ++i) is_peak[i] = y[i] == Label::Peak;
    std::vector<char> goes_left(n, 0);
    std::vector<std::uint32_t> scratch(n);

    std::vector<TreeModel::Node> nodes(1);
    std::vector<Frame> stack{{0, 0, n, 0}};
    const auto min_leaf = static_cast<std::size_t>(p.min_leaf);

    while (!stack.empty()) {
        const Frame fr = stack.back();
        stack.pop_back();
        const std::size_t count = fr.end - fr.begin;
        std::size_t peaks = 0;
        for (std::size_t k = fr.begin; k < fr.end; ++k) peaks += is_peak[sorted[0][k]];
        nodes[static_cast<std::size_t>(fr.node)].p_peak = static_cast<double>(peaks) / static_cast<double>(count);

        if (peaks == 0 || peaks == count) continue;
        if (p.max_depth > 0 && fr.depth >= p.max_depth) continue;
        if (count < 2 * min_leaf) continue;

        double best = std::numeric_limits<double>::infinity();
        std::size_t best_f = 0;
        std::size_t best_pos = 0;
        for (std::size_t f = 0; f < d; ++f) {
            const auto& s = sorted[f];
            const auto col = static_cast<Eigen::Index>(f);
            std::size_t left_peaks = 0;
            for (std::size_t k = fr.begin; k + 1 < fr.end; ++k) {
                left_peaks += is_peak[s[k]];
                const std::size_t nl = k + 1 - fr.begin;
                const std::size_t nr = count - nl;
                if (nl < min_leaf) continue;
                if (nr < min_leaf) break;
                const double v0 = x(static_cast<Eigen::Index>(s[k]), col);
                const double v1 = x(static_cast<Eigen::Index>(s[k + 1]), col);
                if (!(v0 < v1)) continue;
                const double score = weighted_gini(static_cast<double>(nl), static_cast<double>(left_peaks)) +
                                     weighted_gini(static_cast<double>(nr), static_cast<double>(peaks - left_peaks));
                if (score < best) {
                    best = score;
                    best_f = f;
                    best_pos = k;
                }
            }
        }
        if (!std::isfinite(best)) continue;

        const auto col = static_cast<Eigen::Index>(best_f);
        const double lo = x(static_cast<Eigen::Index>(sorted[best_f][best_pos]), col);
        const double hi = x(static_cast<Eigen::Index>(sorted[best_f][best_pos + 1]), col);
        double thr = lo + (hi - lo) / 2.0;
        if (!(thr < hi)) thr = lo;
        const std::size_t mid = best_pos + 1;
        for (std::size_t k = fr.begin; k < fr.end; ++k) goes_left[sorted[best_f][k]] = k < mid;
        for (std::size_t f = 0; f < d; ++f) {
            auto& s = sorted[f];
            std::size_t l = fr.begin;
            std::size_t r = 0;
            for (std::size_t k = fr.begin; k < fr.end; ++k) {
                if (goes_left[s[k]])
                    s[l++] = s[k];
                else
                    scratch[r++] = s[k];
            }
            std::copy(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(r), s.begin() + static_cast<std::ptrdiff_t>(l));
        }

        const int left = static_cast<int>(nodes.size());
        nodes.emplace_back();
        const int right = static_cast<int>(nodes.size());
        nodes.emplace_back();
        auto& node = nodes[static_cast<std::size_t>(fr.node)];
        node.feature = static_cast<int>(best_f);
        node.threshold = thr;
        node.left = left;
        node.right = right;
        stack.push_back({right, mid, fr.end, fr.depth + 1});
        stack.push_back({left, fr.begin, mid, fr.depth + 1});
    }
    return std::make_shared<TreeModel>(d, std::move(nodes));
}

double TreeModel::leaf_value(const Eigen::Ref<const RowVector>& row) const {
    std::size_t k = 0;
    while (nodes_[k].feature >= 0) {
        const auto& nd = nodes_[k];
        k = static_cast<std::size_t>(row(nd.feature) <= nd.threshold ? nd.left : nd.right);
    }
    return nodes_[k].p_peak;
}

Posterior TreeModel::posterior(const Matrix& x) const {
    Posterior out(x.rows(), 2);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double pp = leaf_value(x.row(i));
        out(i, 0) = 1.0 - pp;
        out(i, 1) = pp;
    }
    return out;
}

int TreeModel::depth() const {
    std::vector<int> depth(nodes_.size(), 0);
    int best = 0;
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
        best = std::max(best, depth[k]);
        if (nodes_[k].feature >= 0) {
            depth[static_cast<std::size_t>(nodes_[k].left)] = depth[k] + 1;
            depth[static_cast<std::size_t>(nodes_[k].right)] = depth[k] + 1;
        }
    }
    return best;
}

std::size_t TreeModel::leaf_count() const {
    return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.feature < 0; }));
}

nlohmann::json TreeModel::state_to_json() const {
    nlohmann::json j;
    j["dim"] = dim_;
    auto& arr = j["nodes"] = nlohmann::json::array();
    for (const auto& n : nodes_) arr.push_back({n.feature, n.threshold, n.left, n.right, n.p_peak});
    return j;
}

std::shared_ptr<const TreeModel> TreeModel::from_json(const nlohmann::json& j) {
    std::vector<Node> nodes;
    for (const auto& a : j.at("nodes"))
        nodes.push_back({a.at(0).get<int>(), a.at(1).get<double>(), a.at(2).get<int>(), a.at(3).get<int>(),
                         a.at(4).get<double>()});
    if (nodes.empty()) throw DataError("tree model has no nodes");
    for (const auto& n : nodes)
        if (n.feature >= 0 && (n.left <= 0 || n.right <= 0 || static_cast<std::size_t>(n.left) >= nodes.size() ||
                               static_cast<std::size_t>(n.right) >= nodes.size()))
            throw DataError("tree model has a dangling child index");
    return std::make_shared<TreeModel>(j.at("dim").get<std::size_t>(), std::move(nodes));
}

}  // namespace prach
