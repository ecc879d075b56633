#include "helpers.hpp"

#include "prach/feature_io.hpp"
#include "prach/generator.hpp"
#include "prach/pca.hpp"
#include "prach/psr.hpp"

#include <set>
#include <sstream>

using namespace prach;

TEST_CASE("delay embedding of 1..5 with m=3" * doctest::test_suite("oracle")) {
    const std::vector<double> s{1, 2, 3, 4, 5};
    const Matrix e = psr_embed(s, {3, 1});
    REQUIRE(e.rows() == 3);
    REQUIRE(e.cols() == 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(e(i, j) == s[static_cast<std::size_t>(i + j)]);
}

TEST_CASE("delay embedding boundary cases" * doctest::test_suite("oracle")) {
    const std::vector<double> s{4, 8, 15, 16, 23, 42, 7};
    const Matrix one = psr_embed(s, {1, 1});
    CHECK(one.rows() == 7);
    CHECK(one.cols() == 1);
    for (int i = 0; i < 7; ++i) CHECK(one(i, 0) == s[static_cast<std::size_t>(i)]);
    const Matrix full = psr_embed(s, {7, 1});
    REQUIRE(full.rows() == 1);
    for (int j = 0; j < 7; ++j) CHECK(full(0, j) == s[static_cast<std::size_t>(j)]);
    CHECK_THROWS_AS(psr_embed(std::vector<double>{1, 2}, {3, 1}), DataError);
    const Matrix lag2 = psr_embed(s, {3, 2});
    CHECK(lag2.rows() == 3);
    CHECK(lag2(0, 2) == 23);
}

TEST_CASE("embedding row count and copy-only property" * doctest::test_suite("invariant")) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 20; ++trial) {
        const int len = 10 + trial * 3;
        const PsrConfig cfg{1 + trial % 7, 1 + trial % 3};
        std::vector<double> s(static_cast<std::size_t>(len));
        for (auto& v : s) v = u(rng);
        const Matrix e = psr_embed(s, cfg);
        CHECK(e.rows() == len - (cfg.embed_dim - 1) * cfg.time_lag);
        const std::set<double> values(s.begin(), s.end());
        for (Eigen::Index i = 0; i < e.rows(); ++i)
            for (Eigen::Index j = 0; j < e.cols(); ++j) CHECK(values.count(e(i, j)) == 1);
    }
}

TEST_CASE("psr features shape, labels and padding" * doctest::test_suite("oracle")) {
    GenConfig g;
    g.n_records = 100;
    const FeatureMatrix raw = raw_matrix(generate_dataset(g));
    const FeatureMatrix p = psr_features(raw, PsrConfig{});
    CHECK(p.rows() == 100);
    CHECK(p.cols() == 28);
    CHECK(p.labels == raw.labels);
    CHECK(p.space == SpaceTag::Psr);
    // Block j holds feature j at lags 0..6; past the end the last value repeats.
    for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 7; ++k) {
            CHECK(p.values(10, j * 7 + k) == raw.values(10 + k, j));
            CHECK(p.values(97, j * 7 + k) == raw.values(std::min(97 + k, 99), j));
        }
    const FeatureMatrix same = psr_features(raw, PsrConfig{1, 1});
    CHECK(same.values == raw.values);
}

TEST_CASE("psr of a constant column is constant" * doctest::test_suite("invariant")) {
    Matrix x = Matrix::Constant(20, 4, 0.0);
    for (int i = 0; i < 20; ++i) x(i, 0) = i;
    x.col(2).setConstant(3.5);
    const FeatureMatrix raw(x, std::vector<Label>(20, Label::FalsePeak), SpaceTag::Raw);
    const FeatureMatrix p = psr_features(raw, PsrConfig{});
    for (int i = 0; i < 20; ++i)
        for (int k = 0; k < 7; ++k) CHECK(p.values(i, 2 * 7 + k) == 3.5);
}

TEST_CASE("pca on collinear points" * doctest::test_suite("oracle")) {
    Matrix x(5, 2);
    for (int i = 0; i < 5; ++i) x.row(i) << i, i;
    const PcaModel m = pca_fit(x, 2);
    CHECK(m.components(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(m.components(0, 1) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(std::abs(m.eigenvalues(1)) < 1e-10);
}

TEST_CASE("pca eigenvalue sum equals covariance trace" * doctest::test_suite("oracle")) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix x(200, 4);
    for (Eigen::Index i = 0; i < 200; ++i)
        for (int j = 0; j < 4; ++j) x(i, j) = g(rng) * (j + 1) + (j == 3 ? 0.5 * x(i, 0) : 0.0);
    const PcaModel m = pca_fit(x, 4);
    // Direct sample covariance, N-1 denominator.
    double trace = 0.0;
    for (int j = 0; j < 4; ++j) {
        const double mean = x.col(j).mean();
        double ss = 0.0;
        for (Eigen::Index i = 0; i < 200; ++i) ss += (x(i, j) - mean) * (x(i, j) - mean);
        trace += ss / 199.0;
    }
    CHECK(std::abs(m.eigenvalues.sum() - trace) < 1e-8);
    CHECK(std::abs(m.total_variance - trace) < 1e-8);
}

TEST_CASE("pca invariants on generated data" * doctest::test_suite("invariant")) {
    GenConfig g;
    g.n_records = 2000;
    const FeatureMatrix raw = raw_matrix(generate_dataset(g));
    for (int k = 1; k <= 4; ++k) {
        const PcaModel m = pca_fit(raw, k);
        const Matrix gram = m.components * m.components.transpose();
        CHECK((gram - Matrix::Identity(k, k)).cwiseAbs().maxCoeff() < 1e-8);
        for (int i = 1; i < k; ++i) CHECK(m.eigenvalues(i - 1) >= m.eigenvalues(i));
        for (int i = 0; i < k; ++i) {
            CHECK(m.eigenvalues(i) >= 0.0);
            Eigen::Index arg = 0;
            m.components.row(i).cwiseAbs().maxCoeff(&arg);
            CHECK(m.components(i, arg) > 0.0);
        }
        const FeatureMatrix p = pca_project(m, raw);
        CHECK(p.cols() == static_cast<std::size_t>(k));
        CHECK(p.space == SpaceTag::Pca);
        for (int c = 0; c < k; ++c) CHECK(std::abs(p.values.col(c).mean()) < 1e-7);
        // Explained variance two ways.
        double projected = 0.0;
        for (int c = 0; c < k; ++c) {
            const auto col = p.values.col(c);
            projected += col.squaredNorm() / static_cast<double>(raw.rows() - 1);
        }
        CHECK(std::abs(projected / m.total_variance - m.explained_variance_ratio()) < 1e-7);
    }
}

TEST_CASE("pca full rank preserves distances and round trips" * doctest::test_suite("invariant")) {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix x(50, 4);
    for (Eigen::Index i = 0; i < 50; ++i)
        for (int j = 0; j < 4; ++j) x(i, j) = g(rng);
    const PcaModel m = pca_fit(x, 4);
    const Matrix p = pca_project(m, x);
    for (int a = 0; a < 10; ++a)
        for (int b = a + 1; b < 10; ++b) CHECK(std::abs((x.row(a) - x.row(b)).norm() - (p.row(a) - p.row(b)).norm()) < 1e-8);
    const Matrix back = (p * m.components).rowwise() + m.mean;
    CHECK((back - x).cwiseAbs().maxCoeff() < 1e-8);
    const Matrix mean_only = pca_project(m, Matrix(m.mean));
    CHECK(mean_only.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("pca errors and json round trip") {
    Matrix x = Matrix::Random(10, 4);
    CHECK_THROWS_AS(pca_fit(x, 5), ConfigError);
    CHECK_THROWS_AS(pca_fit(Matrix::Random(1, 4), 2), DataError);
    const PcaModel m = pca_fit(x, 2);
    CHECK_THROWS_AS(pca_project(m, Matrix::Random(3, 3)), DimensionMismatch);
    const PcaModel back = pca_from_json(pca_to_json(m));
    CHECK(back.components == m.components);
    CHECK(back.mean == m.mean);
    CHECK(back.eigenvalues == m.eigenvalues);
}

TEST_CASE("feature csv round trip keeps the space") {
    GenConfig g;
    g.n_records = 60;
    const FeatureMatrix raw = raw_matrix(generate_dataset(g));
    for (const FeatureMatrix& m : {raw, psr_features(raw, PsrConfig{}), pca_project(pca_fit(raw, 2), raw)}) {
        std::stringstream ss;
        write_feature_csv(m, ss);
        const FeatureMatrix back = read_feature_csv(ss);
        CHECK(back.space == m.space);
        CHECK(back.values == m.values);
        CHECK(back.labels == m.labels);
    }
    CHECK(feature_column_names(SpaceTag::Psr, 28)[1] == "amplitude_lag1");
    CHECK(feature_column_names(SpaceTag::Pca, 2)[0] == "pc1");
}
