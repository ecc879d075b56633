#include "helpers.hpp"

#include "prach/generator.hpp"
#include "prach/learner.hpp"
#include "prach/metrics.hpp"
#include "prach/sampling.hpp"
#include "prach/split.hpp"
#include "prach/tune.hpp"

#include <numeric>
#include <sstream>

using namespace prach;

TEST_CASE("density by hand" * doctest::test_suite("oracle")) {
    Matrix pool(3, 2);
    pool << 1, 0, 0, 1, -1, 0;
    const RowVector x = RowVector::Zero(2);
    CHECK(knn_density(x, pool, 3) == doctest::Approx(1.0 / (kDensityEpsilon + 1.0)));
    Matrix dup(3, 2);
    dup << 0, 0, 0, 0, 0, 0;
    CHECK(knn_density(x, dup, 3) == doctest::Approx(1.0 / kDensityEpsilon));
    CHECK_THROWS_AS(knn_density(x, pool, 4), DataError);
}

TEST_CASE("density scales inversely with distance") {
    const auto d = testutil::blobs(30, 0, 3, 0.0, 1.0, 2);
    const RowVector x = RowVector::Constant(3, 0.1);
    const double a = knn_density(x, d.values, 5);
    const double b = knn_density(2.0 * x, Matrix(2.0 * d.values), 5);
    CHECK((1.0 / b - kDensityEpsilon) == doctest::Approx(2.0 * (1.0 / a - kDensityEpsilon)));
}

TEST_CASE("uncertainty from posteriors" * doctest::test_suite("oracle")) {
    CHECK(uncertainty_from_posterior(1.0, 0.0) == 0.0);
    CHECK(uncertainty_from_posterior(0.5, 0.5) == 1.0);
    CHECK(uncertainty_from_posterior(0.75, 0.25) == doctest::Approx(0.5));
    for (double p : {0.0, 0.1, 0.3, 0.5, 0.8})
        CHECK(uncertainty_from_posterior(1 - p, p, UncertaintyMode::Margin) ==
              doctest::Approx(uncertainty_from_posterior(1 - p, p)));
}

TEST_CASE("ranking budget and ties" * doctest::test_suite("invariant")) {
    const std::vector<double> dens{1, 2, 3};
    const std::vector<double> unc{0.5, 0.5, 0.5};
    CHECK(rank_informative(dens, unc, 20).size() == 3);
    const std::vector<double> flat(10, 0.7);
    const auto r = rank_informative(flat, flat, 4);
    REQUIRE(r.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(r[i].row_index == i);
    for (const auto& s : rank_informative(dens, std::vector<double>{0.1, 0.9, 0.4}, 3))
        CHECK(std::abs(s.informativeness - s.density * s.uncertainty) <= 1e-12);
    CHECK(rank_informative({}, {}, 5).empty());
}

TEST_CASE("minmax normalization") {
    const auto v = minmax_normalize(std::vector<double>{2, 4, 6});
    CHECK(v == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(minmax_normalize(std::vector<double>{3, 3}) == std::vector<double>{1.0, 1.0});
}

TEST_CASE("a duplicated row near the boundary ranks first" * doctest::test_suite("oracle")) {
    // Two clusters; one boundary point copied many times. Exhaustive scoring
    // over the pool must put a copy of it on top.
    Matrix pool(40, 2);
    std::vector<Label> labels;
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 0.3);
    for (int i = 0; i < 15; ++i) pool.row(i) << -3 + g(rng), g(rng);
    for (int i = 15; i < 30; ++i) pool.row(i) << 3 + g(rng), g(rng);
    for (int i = 30; i < 40; ++i) pool.row(i) << 0.05, 0.0;
    Matrix train(4, 2);
    train << -3, 0, -2.5, 0, 3, 0, 2.5, 0;
    const std::vector<Label> ty{Label::FalsePeak, Label::FalsePeak, Label::Peak, Label::Peak};
    const TrainedModel model = fit({ClassifierKind::Knn, KnnParams{4}}, train, ty);
    const FeatureMatrix fm(pool, std::vector<Label>(40, Label::FalsePeak), SpaceTag::Raw);
    SamplingConfig cfg;
    cfg.j = 40;
    const auto ranked = select_informative(fm, model, cfg);

    std::vector<double> dens, unc;
    for (Eigen::Index i = 0; i < 40; ++i) {
        Matrix rest(39, 2);
        for (Eigen::Index r = 0, o = 0; r < 40; ++r)
            if (r != i) rest.row(o++) = pool.row(r);
        dens.push_back(knn_density(pool.row(i), rest, cfg.k_density));
        const Posterior p = model.posterior(Matrix(pool.row(i)));
        unc.push_back(uncertainty_from_posterior(p(0, 0), p(0, 1)));
    }
    const auto nd = minmax_normalize(dens);
    const auto nu = minmax_normalize(unc);
    std::size_t best = 0;
    for (std::size_t i = 1; i < 40; ++i)
        if (nd[i] * nu[i] > nd[best] * nu[best]) best = i;
    CHECK(best >= 30);
    CHECK(ranked.front().row_index == best);
    for (std::size_t i = 0; i < 40; ++i) CHECK(std::abs(ranked[i].raw_density - dens[ranked[i].row_index]) < 1e-9);
}

TEST_CASE("moving a row away never improves its rank" * doctest::test_suite("invariant")) {
    const auto d = testutil::blobs(20, 0, 2, 0.0, 1.0, 6);
    const std::vector<double> unc(20, 0.5);
    std::vector<double> base_unc = unc;
    base_unc[7] = 0.8;
    Matrix pool = d.values;
    auto rank_of = [&](const Matrix& p) {
        const auto r = rank_informative(pool_densities(p, 3), base_unc, 20);
        for (std::size_t i = 0; i < r.size(); ++i)
            if (r[i].row_index == 7) return i;
        return r.size();
    };
    std::size_t prev = rank_of(pool);
    for (double shift : {1.0, 2.0, 4.0, 8.0}) {
        Matrix moved = pool;
        moved.row(7) = pool.row(7) + RowVector::Constant(2, shift);
        const std::size_t now = rank_of(moved);
        CHECK(now >= prev);
        prev = now;
    }
}

TEST_CASE("density tracker matches brute force under removals" * doctest::test_suite("invariant")) {
    const auto d = testutil::blobs(150, 50, 3, 1.0, 1.0, 13);
    DensityTracker tracker(d.values, 5, 8);
    std::vector<std::size_t> live(d.rows());
    std::iota(live.begin(), live.end(), std::size_t{0});
    std::mt19937_64 rng(4);
    while (live.size() > 6) {
        Matrix sub(static_cast<Eigen::Index>(live.size()), 3);
        for (std::size_t i = 0; i < live.size(); ++i) sub.row(static_cast<Eigen::Index>(i)) = d.values.row(static_cast<Eigen::Index>(live[i]));
        const auto brute = pool_densities(sub, 5);
        const auto tracked = tracker.densities(live);
        for (std::size_t i = 0; i < live.size(); ++i) CHECK(tracked[i] == brute[i]);
        std::shuffle(live.begin(), live.end(), rng);
        std::vector<std::size_t> gone(live.begin(), live.begin() + 17 > live.end() - 6 ? live.end() - 6 : live.begin() + 17);
        live.erase(live.begin(), live.begin() + static_cast<std::ptrdiff_t>(gone.size()));
        std::sort(live.begin(), live.end());
        tracker.remove(gone);
        CHECK(tracker.alive() == live.size());
    }
    CHECK(tracker.rescans() > 0);
}

TEST_CASE("incremental sessions agree with refitting" * doctest::test_suite("invariant")) {
    const auto d = testutil::blobs(200, 60, 4, 1.0, 1.0, 17);
    std::vector<std::size_t> t0, rest;
    for (std::size_t i = 0; i < d.rows(); ++i) (i % 8 == 0 ? t0 : rest).push_back(i);
    const FeatureMatrix train0 = d.subset(t0);
    const FeatureMatrix pool = d.subset(rest);
    const ClassifierSpec specs[] = {{ClassifierKind::Knn, KnnParams{5}},
                                    {ClassifierKind::Elm, ElmParams{32, 1e-3, Activation::Sigmoid, 3}},
                                    {ClassifierKind::DecisionTree, TreeParams{}}};
    for (const auto& spec : specs) {
        auto inc = make_session(spec, train0.values, train0.labels, pool.values, true);
        auto ref = make_session(spec, train0.values, train0.labels, pool.values, false);
        std::vector<std::size_t> all(pool.rows());
        std::iota(all.begin(), all.end(), std::size_t{0});
        for (std::size_t start = 0; start + 25 <= all.size(); start += 25) {
            const std::vector<std::size_t> left(all.begin() + static_cast<std::ptrdiff_t>(start), all.end());
            const Posterior a = inc->pool_posterior(left);
            const Posterior b = ref->pool_posterior(left);
            CHECK_MESSAGE((a - b).cwiseAbs().maxCoeff() < 1e-9, spec.describe());
            std::vector<std::size_t> rows(all.begin() + static_cast<std::ptrdiff_t>(start),
                                          all.begin() + static_cast<std::ptrdiff_t>(start + 25));
            std::vector<Label> lab;
            for (auto r : rows) lab.push_back(pool.labels[r]);
            inc->add(rows, lab);
            ref->add(rows, lab);
            CHECK(inc->train_size() == ref->train_size());
        }
        const Posterior a = inc->model().posterior(d);
        const Posterior b = ref->model().posterior(d);
        CHECK((a - b).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("self training cycle count and partition" * doctest::test_suite("invariant")) {
    const auto d = testutil::blobs(60, 25, 2, 2.0, 1.0, 3);
    std::vector<std::size_t> t0, rest;
    for (std::size_t i = 0; i < d.rows(); ++i) (i % 2 == 0 && t0.size() < 40 ? t0 : rest).push_back(i);
    const FeatureMatrix train0 = d.subset(t0);
    const FeatureMatrix pool = d.subset(rest);
    REQUIRE(pool.rows() == 45);
    SamplingConfig cfg;
    const auto st = self_train(train0, pool, {ClassifierKind::Knn, KnnParams{3}}, cfg);
    REQUIRE(st.cycles.size() == 3);
    CHECK(st.cycles[0].moved.size() == 20);
    CHECK(st.cycles[1].moved.size() == 20);
    CHECK(st.cycles[2].moved.size() == 5);
    CHECK(expected_cycles(45, 20) == 3);
    std::vector<int> seen(45, 0);
    std::size_t size = train0.rows();
    for (const auto& c : st.cycles) {
        for (auto r : c.moved) ++seen[r];
        size += c.moved.size();
        CHECK(c.train_size == size);
        for (std::size_t i = 0; i < c.moved.size(); ++i) CHECK(c.true_labels[i] == pool.labels[c.moved[i]]);
    }
    for (int s : seen) CHECK(s == 1);
    std::ostringstream audit;
    write_audit_csv(st.cycles, audit);
    CHECK(audit.str().find("cycle,train_size") == 0);
}

TEST_CASE("self training with an empty pool is plain training" * doctest::test_suite("oracle")) {
    const auto d = testutil::blobs(30, 10, 2, 2.0, 1.0, 8);
    const FeatureMatrix empty(Matrix(0, 2), {}, SpaceTag::Raw);
    const ClassifierSpec spec{ClassifierKind::GaussianNb, NbParams{}};
    const auto st = self_train(d, empty, spec, SamplingConfig{});
    CHECK(st.cycles.empty());
    CHECK(st.fits == 1);
    CHECK(st.model.posterior(d) == fit(spec, d).posterior(d));
}

TEST_CASE("pseudo labels come from the model, not the pool labels" * doctest::test_suite("invariant")) {
    const auto d = testutil::blobs(40, 40, 2, 3.0, 0.5, 9);
    std::vector<std::size_t> t0, rest;
    for (std::size_t i = 0; i < d.rows(); ++i) (i % 4 == 0 ? t0 : rest).push_back(i);
    FeatureMatrix pool = d.subset(rest);
    for (auto& l : pool.labels) l = Label::Peak;  // lies that must not leak into training
    const auto st = self_train(d.subset(t0), pool, {ClassifierKind::Knn, KnnParams{3}}, SamplingConfig{});
    std::size_t pseudo_false = 0;
    for (const auto& c : st.cycles)
        for (auto l : c.pseudo_labels) pseudo_false += l == Label::FalsePeak;
    CHECK(pseudo_false > 20);
}

TEST_CASE("fit failure reports the cycle") {
    const auto d = testutil::blobs(20, 0, 2, 0.0, 1.0, 1);
    FeatureMatrix train0 = d.subset(std::vector<std::size_t>{0, 1, 2});
    const FeatureMatrix pool = d.subset(std::vector<std::size_t>{3, 4, 5, 6});
    try {
        self_train(train0, pool, {ClassifierKind::DecisionTree, TreeParams{}}, SamplingConfig{});
        FAIL("expected a fit failure");
    } catch (const DataError& e) {
        const std::string msg = e.what();
        CHECK(msg.rfind("self-training cycle ", 0) == 0);
        CHECK(msg.find("both classes") != std::string::npos);
    }
}

TEST_CASE("self training keeps up with plain training on clean raw data" * doctest::test_suite("oracle")) {
    // Paired over 5 seeds on the generator's raw features.
    const ClassifierKind kinds[] = {ClassifierKind::DecisionTree, ClassifierKind::Knn, ClassifierKind::Elm,
                                    ClassifierKind::GaussianNb};
    for (auto kind : kinds) {
        double self_sum = 0.0, plain_sum = 0.0;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            GenConfig g;
            g.seed = seed;
            const FeatureMatrix raw = raw_matrix(generate_dataset(g));
            const auto split = stratified_split(raw.labels, 0.7, seed);
            const FeatureMatrix tr = raw.subset(split.train);
            const FeatureMatrix te = raw.subset(split.test);
            const auto init = stratified_split(tr.labels, 0.1, seed + 100);
            const ClassifierSpec spec = ClassifierSpec::defaults(kind);
            const auto st = self_train(tr.subset(init.train), tr.subset(init.test), spec, SamplingConfig{});
            self_sum += f1_score(te.labels, st.model.predict(te));
            plain_sum += f1_score(te.labels, fit(spec, tr).predict(te));
        }
        CHECK_MESSAGE(self_sum / 5 >= plain_sum / 5 - 0.01, to_string(kind), " self ", self_sum / 5, " plain ",
                      plain_sum / 5);
    }
}

TEST_CASE("sampling config validation") {
    SamplingConfig c;
    c.j = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = SamplingConfig{};
    c.initial_fraction = 1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    CHECK(parse_uncertainty_mode("margin") == UncertaintyMode::Margin);
}
