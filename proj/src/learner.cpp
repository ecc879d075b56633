#include "prach/learner.hpp"

#include "prach/decision_tree.hpp"
#include "prach/elm.hpp"
#include "prach/knn.hpp"

#include <optional>

namespace prach {

namespace {

// Training rows: the initial set followed by absorbed pool rows in order.
class GrowingSet {
public:
    GrowingSet(const Matrix& x0, std::span<const Label> y0, const Matrix& pool)
        : x_(x0.rows() + pool.rows(), x0.cols()), y_(y0.begin(), y0.end()), n_(x0.rows()) {
        x_.topRows(n_) = x0;
    }
    void append(const Matrix& pool, std::span<const std::size_t> rows, std::span<const Label> labels) {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            x_.row(n_++) = pool.row(static_cast<Eigen::Index>(rows[i]));
            y_.push_back(labels[i]);
        }
    }
    Matrix x() const { return x_.topRows(n_); }
    const std::vector<Label>& y() const { return y_; }
    Eigen::Index size() const { return n_; }
    const Matrix& storage() const { return x_; }

private:
    Matrix x_;
    std::vector<Label> y_;
    Eigen::Index n_;
};

Matrix gather(const Matrix& m, std::span<const std::size_t> rows) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
    return out;
}

class RefitSession final : public LearnerSession {
public:
    RefitSession(const ClassifierSpec& spec, const Matrix& x0, std::span<const Label> y0, const Matrix& pool)
        : spec_(spec), pool_(pool), set_(x0, y0, pool) {}

    void add(std::span<const std::size_t> rows, std::span<const Label> labels) override {
        set_.append(pool_, rows, labels);
        model_.reset();
    }
    Posterior pool_posterior(std::span<const std::size_t> rows) override {
        return current().posterior(gather(pool_, rows));
    }
    TrainedModel model() override { return current(); }
    std::size_t train_size() const override { return static_cast<std::size_t>(set_.size()); }

private:
    const TrainedModel& current() {
        if (!model_) model_ = fit(spec_, set_.x(), set_.y());
        return *model_;
    }
    ClassifierSpec spec_;
    const Matrix& pool_;
    GrowingSet set_;
    std::optional<TrainedModel> model_;
};

// Keeps every pool row's k nearest training rows; new training rows are
// merged in with the same distance and tie order a full refit would use.
class KnnSession final : public LearnerSession {
public:
    KnnSession(const ClassifierSpec& spec, const Matrix& x0, std::span<const Label> y0, const Matrix& pool)
        : spec_(spec), k_(static_cast<std::size_t>(spec.get<KnnParams>().k)), pool_(pool), set_(x0, y0, pool),
          top_(static_cast<std::size_t>(pool.rows())), dead_(static_cast<std::size_t>(pool.rows()), 0) {
        for (Eigen::Index p = 0; p < pool.rows(); ++p) top_[static_cast<std::size_t>(p)] = nearest_rows(x0, pool.row(p).data(), k_);
    }

    void add(std::span<const std::size_t> rows, std::span<const Label> labels) override {
        const auto first = static_cast<std::uint32_t>(set_.size());
        set_.append(pool_, rows, labels);
        for (auto r : rows) dead_[r] = 1;
        const auto d = pool_.cols();
        const Matrix& store = set_.storage();
        for (Eigen::Index p = 0; p < pool_.rows(); ++p) {
            if (dead_[static_cast<std::size_t>(p)]) continue;
            auto& top = top_[static_cast<std::size_t>(p)];
            for (std::uint32_t t = first; t < static_cast<std::uint32_t>(set_.size()); ++t)
                push_neighbor(top, {squared_distance(store.row(t).data(), pool_.row(p).data(), d), t}, k_);
        }
    }
    Posterior pool_posterior(std::span<const std::size_t> rows) override {
        const std::size_t k = std::min<std::size_t>(k_, static_cast<std::size_t>(set_.size()));
        Posterior out(static_cast<Eigen::Index>(rows.size()), 2);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            std::size_t peaks = 0;
            for (const auto& nb : top_[rows[i]]) peaks += set_.y()[nb.index] == Label::Peak;
            const double pp = knn_peak_posterior(peaks, k);
            out(static_cast<Eigen::Index>(i), 0) = 1.0 - pp;
            out(static_cast<Eigen::Index>(i), 1) = pp;
        }
        return out;
    }
    TrainedModel model() override {
        return TrainedModel(spec_, std::make_shared<KnnModel>(set_.x(), set_.y(), spec_.get<KnnParams>().k));
    }
    std::size_t train_size() const override { return static_cast<std::size_t>(set_.size()); }

private:
    ClassifierSpec spec_;
    std::size_t k_;
    const Matrix& pool_;
    GrowingSet set_;
    std::vector<std::vector<Neighbor>> top_;
    std::vector<char> dead_;
};

// Keeps the per-feature sort order of the training rows and merges new rows in.
class TreeSession final : public LearnerSession {
public:
    TreeSession(const ClassifierSpec& spec, const Matrix& x0, std::span<const Label> y0, const Matrix& pool)
        : spec_(spec), pool_(pool), set_(x0, y0, pool), order_(tree_sort_order(x0, y0.size())) {}

    void add(std::span<const std::size_t> rows, std::span<const Label> labels) override {
        const auto old_rows = static_cast<std::size_t>(set_.size());
        set_.append(pool_, rows, labels);
        tree_sort_extend(order_, set_.storage(), old_rows, static_cast<std::size_t>(set_.size()));
        model_.reset();
    }
    Posterior pool_posterior(std::span<const std::size_t> rows) override {
        return current().posterior(gather(pool_, rows));
    }
    TrainedModel model() override { return current(); }
    std::size_t train_size() const override { return static_cast<std::size_t>(set_.size()); }

private:
    const TrainedModel& current() {
        if (!model_)
            model_ = TrainedModel(spec_, fit_tree_sorted(spec_.get<TreeParams>(), set_.storage(), set_.y(), order_));
        return *model_;
    }
    ClassifierSpec spec_;
    const Matrix& pool_;
    GrowingSet set_;
    TreeSortOrder order_;
    std::optional<TrainedModel> model_;
};

// Accumulates H'H and H't; pool hidden activations are computed once.
class ElmSession final : public LearnerSession {
public:
    ElmSession(const ClassifierSpec& spec, const Matrix& x0, std::span<const Label> y0, const Matrix& pool)
        : spec_(spec), params_(spec.get<ElmParams>()), weights_(elm_random_weights(params_, x0.cols())),
          pool_hidden_(elm_hidden(weights_, params_.activation, pool)), n_(x0.rows()) {
        const Matrix h0 = elm_hidden(weights_, params_.activation, x0);
        const auto l = h0.cols();
        gram_ = Eigen::MatrixXd::Zero(l, l);
        gram_.selfadjointView<Eigen::Lower>().rankUpdate(h0.transpose());
        rhs_ = Vector::Zero(l);
        for (Eigen::Index i = 0; i < h0.rows(); ++i) rhs_ += h0.row(i).transpose() * elm_target(y0[static_cast<std::size_t>(i)]);
    }

    void add(std::span<const std::size_t> rows, std::span<const Label> labels) override {
        const Matrix h = gather(pool_hidden_, rows);
        gram_.selfadjointView<Eigen::Lower>().rankUpdate(h.transpose());
        for (std::size_t i = 0; i < rows.size(); ++i)
            rhs_ += h.row(static_cast<Eigen::Index>(i)).transpose() * elm_target(labels[i]);
        n_ += static_cast<Eigen::Index>(rows.size());
        beta_.reset();
    }
    Posterior pool_posterior(std::span<const std::size_t> rows) override {
        const Vector& b = beta();
        Posterior out(static_cast<Eigen::Index>(rows.size()), 2);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const double pp = elm_peak_posterior(pool_hidden_.row(static_cast<Eigen::Index>(rows[i])).dot(b));
            out(static_cast<Eigen::Index>(i), 0) = 1.0 - pp;
            out(static_cast<Eigen::Index>(i), 1) = pp;
        }
        return out;
    }
    TrainedModel model() override {
        return TrainedModel(spec_, std::make_shared<ElmModel>(weights_.weights, weights_.bias, beta(), params_.activation));
    }
    std::size_t train_size() const override { return static_cast<std::size_t>(n_); }

private:
    const Vector& beta() {
        if (!beta_) {
            Eigen::MatrixXd full = gram_.selfadjointView<Eigen::Lower>();
            beta_ = elm_solve_gram(full, rhs_, params_.ridge);
        }
        return *beta_;
    }
    ClassifierSpec spec_;
    ElmParams params_;
    ElmWeights weights_;
    Matrix pool_hidden_;
    Eigen::MatrixXd gram_;
    Vector rhs_;
    Eigen::Index n_;
    std::optional<Vector> beta_;
};

}  // namespace

std::unique_ptr<LearnerSession> make_session(const ClassifierSpec& spec, const Matrix& train_x,
                                             std::span<const Label> train_y, const Matrix& pool_x, bool incremental) {
    spec.validate();
    check_fit_input(train_x, train_y);
    if (pool_x.rows() > 0) check_dim(static_cast<std::size_t>(train_x.cols()), pool_x);
    if (incremental && spec.kind == ClassifierKind::Knn)
        return std::make_unique<KnnSession>(spec, train_x, train_y, pool_x);
    if (incremental && spec.kind == ClassifierKind::Elm && spec.get<ElmParams>().ridge > 0.0)
        return std::make_unique<ElmSession>(spec, train_x, train_y, pool_x);
    if (incremental && spec.kind == ClassifierKind::DecisionTree)
        return std::make_unique<TreeSession>(spec, train_x, train_y, pool_x);
    return std::make_unique<RefitSession>(spec, train_x, train_y, pool_x);
}

}  // namespace prach
