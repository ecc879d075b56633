#include "helpers.hpp"

#include "prach/decision_tree.hpp"
#include "prach/elm.hpp"
#include "prach/gaussian_nb.hpp"
#include "prach/generator.hpp"
#include "prach/knn.hpp"
#include "prach/metrics.hpp"
#include "prach/split.hpp"
#include "prach/tune.hpp"

using namespace prach;

namespace {

const ClassifierKind kAllKinds[] = {ClassifierKind::DecisionTree, ClassifierKind::Knn, ClassifierKind::Elm,
                                    ClassifierKind::GaussianNb};

}  // namespace

TEST_CASE("naive bayes by hand on two point masses" * doctest::test_suite("oracle")) {
    Matrix x(20, 2);
    std::vector<Label> y;
    for (int i = 0; i < 20; ++i) {
        const bool b = i >= 10;
        x.row(i) << (b ? 10.0 : 0.0), (b ? 10.0 : 0.0);
        y.push_back(b ? Label::Peak : Label::FalsePeak);
    }
    const auto nb = fit_nb(NbParams{1e-9}, x, y);
    CHECK(nb->means()(0, 0) == 0.0);
    CHECK(nb->means()(1, 1) == 10.0);
    CHECK(nb->variances()(0, 0) == doctest::Approx(1e-9));
    const TrainedModel m = fit({ClassifierKind::GaussianNb, NbParams{1e-9}}, x, y);
    Matrix q(1, 2);
    q << 0.1, 0.1;
    CHECK(m.predict(q)[0] == Label::FalsePeak);
    // Hand log-likelihood ratio: each axis contributes (0.1^2 - 9.9^2) / (2 var) with equal priors.
    const Posterior p = m.posterior(q);
    CHECK(p(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("naive bayes is symmetric at the midpoint") {
    Matrix x(4, 1);
    x << -1, -3, 1, 3;
    const std::vector<Label> y{Label::FalsePeak, Label::FalsePeak, Label::Peak, Label::Peak};
    const TrainedModel m = fit(ClassifierSpec::defaults(ClassifierKind::GaussianNb), x, y);
    Matrix q(1, 1);
    q << 0.0;
    const Posterior p = m.posterior(q);
    CHECK(p(0, 0) == doctest::Approx(0.5));
    CHECK(m.predict(q)[0] == Label::FalsePeak);
}

TEST_CASE("1-nn reproduces its training labels") {
    const auto d = testutil::blobs(40, 40, 3, 0.5, 1.0, 4);
    const TrainedModel m = fit({ClassifierKind::Knn, KnnParams{1}}, d);
    CHECK(accuracy(d.labels, m.predict(d)) == 1.0);
}

TEST_CASE("knn laplace posterior by hand" * doctest::test_suite("oracle")) {
    CHECK(knn_peak_posterior(5, 5) == doctest::Approx(6.0 / 7.0));
    CHECK(knn_peak_posterior(0, 5) == doctest::Approx(1.0 / 7.0));
    Matrix x(6, 1);
    x << 0, 0.1, 0.2, 0.3, 0.4, 9;
    const std::vector<Label> y(6, Label::Peak);
    std::vector<Label> y2 = y;
    y2[5] = Label::FalsePeak;
    const TrainedModel m = fit({ClassifierKind::Knn, KnnParams{5}}, x, y2);
    Matrix q(1, 1);
    q << 0.2;
    CHECK(m.posterior(q)(0, 1) == doctest::Approx(6.0 / 7.0));
}

TEST_CASE("elm with zero ridge and a square hidden matrix interpolates" * doctest::test_suite("oracle")) {
    // 5 points, 5 hidden units: H is 5x5; with lambda 0 the output layer solves H beta = t exactly.
    Matrix x(5, 2);
    x << 0.1, 0.9, -0.4, 0.3, 0.7, -0.2, -0.8, -0.6, 0.2, 0.05;
    const std::vector<Label> y{Label::Peak, Label::FalsePeak, Label::Peak, Label::FalsePeak, Label::FalsePeak};
    const ElmParams p{5, 0.0, Activation::Sigmoid, 17};
    const auto model = fit_elm(p, x, y);
    const Matrix h = elm_hidden(elm_random_weights(p, 2), p.activation, x);
    REQUIRE(std::abs(h.determinant()) > 1e-12);
    Vector t(5);
    for (int i = 0; i < 5; ++i) t(i) = elm_target(y[static_cast<std::size_t>(i)]);
    const Vector exact = h.fullPivLu().solve(t);
    const Vector out = model->output(x);
    for (int i = 0; i < 5; ++i) {
        CHECK(std::abs(out(i) - t(i)) < 1e-6);
        CHECK(std::abs(model->beta()(i) - exact(i)) < 1e-6 * std::max(1.0, std::abs(exact(i))));
    }
}

TEST_CASE("elm weights are a function of the seed") {
    const ElmParams a{16, 1e-3, Activation::Sigmoid, 5};
    ElmParams b = a;
    b.weight_seed = 6;
    CHECK(elm_random_weights(a, 4).weights == elm_random_weights(a, 4).weights);
    CHECK_FALSE(elm_random_weights(a, 4).weights == elm_random_weights(b, 4).weights);
    const auto d = testutil::blobs(30, 30, 4, 1.0, 1.0, 2);
    CHECK(fit({ClassifierKind::Elm, a}, d).posterior(d) == fit({ClassifierKind::Elm, a}, d).posterior(d));
    const auto w = elm_random_weights(a, 4);
    CHECK(w.weights.cwiseAbs().maxCoeff() <= 1.0);
    CHECK(w.bias.cwiseAbs().maxCoeff() <= 1.0);
}

TEST_CASE("argmax ties go to FalsePeak") {
    CHECK(argmax_label(0.9, 0.1) == Label::FalsePeak);
    CHECK(argmax_label(0.5, 0.5) == Label::FalsePeak);
    CHECK(argmax_label(0.4, 0.6) == Label::Peak);
}

TEST_CASE("posterior rows sum to one for every kind" * doctest::test_suite("invariant")) {
    const auto d = testutil::blobs(60, 20, 4, 1.0, 1.0, 8);
    const auto q = testutil::blobs(30, 30, 4, 0.5, 3.0, 9);
    for (auto kind : kAllKinds) {
        const TrainedModel m = fit(ClassifierSpec::defaults(kind), d);
        const Posterior p = m.posterior(q);
        for (Eigen::Index i = 0; i < p.rows(); ++i) {
            CHECK(std::abs(p.row(i).sum() - 1.0) < 1e-9);
            CHECK(p(i, 0) >= 0.0);
            CHECK(p(i, 1) >= 0.0);
        }
    }
}

TEST_CASE("fit input errors") {
    const auto d = testutil::blobs(10, 10, 2, 3.0, 1.0, 1);
    for (auto kind : kAllKinds) {
        CHECK_THROWS_AS(fit(ClassifierSpec::defaults(kind), d.values, std::vector<Label>(3, Label::Peak)), DimensionMismatch);
        const TrainedModel m = fit(ClassifierSpec::defaults(kind), d);
        CHECK_THROWS_AS(m.posterior(Matrix::Zero(2, 3)), DimensionMismatch);
    }
    CHECK_THROWS_AS(fit(ClassifierSpec::defaults(ClassifierKind::DecisionTree), d.values,
                        std::vector<Label>(20, Label::Peak)),
                    DegenerateInput);
    CHECK_THROWS_AS(fit(ClassifierSpec::defaults(ClassifierKind::GaussianNb), d.values,
                        std::vector<Label>(20, Label::FalsePeak)),
                    DegenerateInput);
    CHECK_THROWS_AS((ClassifierSpec{ClassifierKind::Knn, KnnParams{0}}.validate()), ConfigError);
    CHECK_THROWS_AS((ClassifierSpec{ClassifierKind::Knn, TreeParams{}}.validate()), ConfigError);
    CHECK_THROWS_AS(TrainedModel().posterior(d.values), DataError);
}

TEST_CASE("tree honours depth and splits at midpoints" * doctest::test_suite("oracle")) {
    Matrix x(4, 1);
    x << 0, 1, 2, 3;
    const std::vector<Label> y{Label::FalsePeak, Label::FalsePeak, Label::Peak, Label::Peak};
    const auto tree = fit_tree(TreeParams{0, 1}, x, y);
    REQUIRE(tree->nodes().size() == 3);
    CHECK(tree->nodes()[0].threshold == 1.5);
    CHECK(tree->depth() == 1);
    CHECK(tree->leaf_count() == 2);
    const auto d = testutil::blobs(200, 200, 3, 0.3, 1.0, 3);
    for (int depth : {1, 2, 4}) CHECK(fit_tree(TreeParams{depth, 1}, d.values, d.labels)->depth() <= depth);
}

TEST_CASE("presorted tree fit matches a fresh fit after extension" * doctest::test_suite("invariant")) {
    const auto d = testutil::blobs(150, 50, 5, 0.8, 1.0, 21);
    const Eigen::Index first = 120;
    auto order = tree_sort_order(d.values, static_cast<std::size_t>(first));
    tree_sort_extend(order, d.values, static_cast<std::size_t>(first), d.rows());
    CHECK(order == tree_sort_order(d.values, d.rows()));
    const auto a = fit_tree_sorted(TreeParams{}, d.values, d.labels, order);
    const auto b = fit_tree(TreeParams{}, d.values, d.labels);
    REQUIRE(a->nodes().size() == b->nodes().size());
    for (std::size_t i = 0; i < a->nodes().size(); ++i) {
        CHECK(a->nodes()[i].feature == b->nodes()[i].feature);
        CHECK(a->nodes()[i].threshold == b->nodes()[i].threshold);
        CHECK(a->nodes()[i].p_peak == b->nodes()[i].p_peak);
    }
}

TEST_CASE("model json round trip preserves predictions") {
    const auto d = testutil::blobs(50, 30, 4, 1.0, 1.0, 12);
    const auto dir = testutil::temp_dir("models");
    for (auto kind : kAllKinds) {
        const TrainedModel m = fit(ClassifierSpec::defaults(kind), d);
        const std::string path = (dir / (std::string(to_string(kind)) + ".json")).string();
        save_model(m, path);
        const TrainedModel back = load_model(path);
        CHECK(back.spec() == m.spec());
        CHECK(back.posterior(d) == m.posterior(d));
    }
}

TEST_CASE("spec json and parsing") {
    for (auto kind : kAllKinds) {
        const auto s = ClassifierSpec::defaults(kind);
        CHECK(spec_from_json(spec_to_json(s)) == s);
        CHECK(parse_classifier_kind(to_string(kind)) == kind);
    }
    CHECK(parse_classifier_kind("knn") == ClassifierKind::Knn);
    CHECK(parse_classifier_kind("nb") == ClassifierKind::GaussianNb);
    CHECK_THROWS_AS(parse_classifier_kind("svm"), ConfigError);
}

TEST_CASE("every kind is near perfect on a clean generated split") {
    const auto ds = generate_dataset(GenConfig{});
    const FeatureMatrix raw = raw_matrix(ds);
    const auto split = stratified_split(raw.labels, 0.7, 5);
    const FeatureMatrix tr = raw.subset(split.train);
    const FeatureMatrix te = raw.subset(split.test);
    for (auto kind : kAllKinds) {
        const TrainedModel m = fit(ClassifierSpec::defaults(kind), tr);
        CHECK_MESSAGE(f1_score(te.labels, m.predict(te)) >= 0.99, to_string(kind));
    }
}

TEST_CASE("tune on a singleton grid and on duplicates") {
    const auto d = testutil::blobs(60, 30, 2, 1.0, 1.0, 5);
    const std::vector<ClassifierSpec> one{{ClassifierKind::Knn, KnnParams{3}}};
    CHECK(tune(one, d, 3, 1).best == one[0]);
    const std::vector<ClassifierSpec> dup{{ClassifierKind::Knn, KnnParams{1}}, {ClassifierKind::Knn, KnnParams{1}}};
    const auto r = tune(dup, d, 3, 1);
    CHECK(r.scores[0] == r.scores[1]);
    CHECK(r.best == dup[0]);
    CHECK_THROWS_AS(tune({}, d, 3, 1), ConfigError);
    CHECK_THROWS_AS(tune(one, d, 1, 1), ConfigError);
}

namespace {

// Independent cross-validation: same folds, plain fit/predict per grid point.
std::vector<double> exhaustive_cv(const std::vector<ClassifierSpec>& grid, const FeatureMatrix& d, int folds,
                                  std::uint64_t seed) {
    const auto fold = stratified_folds(d.labels, folds, seed);
    std::vector<double> out;
    for (const auto& spec : grid) {
        double total = 0.0;
        for (int f = 0; f < folds; ++f) {
            std::vector<std::size_t> tr, va;
            for (std::size_t i = 0; i < fold.size(); ++i) (fold[i] == f ? va : tr).push_back(i);
            const FeatureMatrix a = d.subset(tr);
            const FeatureMatrix b = d.subset(va);
            total += f1_score(b.labels, fit(spec, a).predict(b));
        }
        out.push_back(total / folds);
    }
    return out;
}

}  // namespace

TEST_CASE("knn grid selection matches an exhaustive cross-validation oracle" * doctest::test_suite("oracle")) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto d = testutil::blobs(120, 40, 3, 1.2, 1.0, 30 + seed);
        const std::vector<ClassifierSpec> grid{{ClassifierKind::Knn, KnnParams{1}},
                                               {ClassifierKind::Knn, KnnParams{5}},
                                               {ClassifierKind::Knn, KnnParams{15}}};
        const auto oracle = exhaustive_cv(grid, d, 3, seed);
        const auto r = tune(grid, d, 3, seed);
        std::size_t best = 0;
        for (std::size_t g = 1; g < grid.size(); ++g)
            if (oracle[g] > oracle[best]) best = g;
        CHECK(r.best == grid[best]);
        for (std::size_t g = 0; g < grid.size(); ++g) CHECK(r.scores[g] == oracle[g]);
    }
}

TEST_CASE("shared-hidden-layer elm tuning equals plain cross-validation" * doctest::test_suite("oracle")) {
    const auto d = testutil::blobs(90, 30, 3, 1.0, 1.0, 44);
    const auto grid = default_grid(ClassifierKind::Elm, 3);
    const auto oracle = exhaustive_cv(grid, d, 3, 8);
    const auto r = tune(grid, d, 3, 8);
    for (std::size_t g = 0; g < grid.size(); ++g) CHECK(r.scores[g] == oracle[g]);
}

TEST_CASE("tuning on permuted labels scores near the class prior" * doctest::test_suite("oracle")) {
    auto d = testutil::blobs(150, 150, 3, 2.0, 1.0, 77);
    std::mt19937_64 rng(1);
    std::shuffle(d.labels.begin(), d.labels.end(), rng);
    // Guessing Peak at the prior rate p has precision p and recall p, so F1 = p.
    const double prior = 0.5;
    for (auto kind : kAllKinds) {
        const auto r = tune(default_grid(kind), d, 3, 2);
        CHECK_MESSAGE(std::abs(r.best_score - prior) <= 0.1, to_string(kind), " scored ", r.best_score);
    }
}

TEST_CASE("default grids") {
    CHECK(default_grid(ClassifierKind::DecisionTree).size() == 4);
    CHECK(default_grid(ClassifierKind::Knn).size() == 4);
    CHECK(default_grid(ClassifierKind::Elm).size() == 9);
    CHECK(default_grid(ClassifierKind::GaussianNb).size() == 1);
}
