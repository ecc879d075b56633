#include "prach/tune.hpp"

#include "prach/elm.hpp"
#include "prach/knn.hpp"
#include "prach/metrics.hpp"
#include "prach/split.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace prach {

std::vector<ClassifierSpec> default_grid(ClassifierKind kind, std::uint64_t weight_seed) {
    std::vector<ClassifierSpec> grid;
    switch (kind) {
        case ClassifierKind::DecisionTree:
            for (int depth : {3, 5, 10, 0}) grid.push_back({kind, TreeParams{depth, 1}});
            break;
        case ClassifierKind::Knn:
            for (int k : {1, 3, 5, 11}) grid.push_back({kind, KnnParams{k}});
            break;
        case ClassifierKind::Elm:
            for (int h : {32, 128, 512})
                for (double r : {1e-5, 1e-3, 1e-1}) grid.push_back({kind, ElmParams{h, r, Activation::Sigmoid, weight_seed}});
            break;
        case ClassifierKind::GaussianNb: grid.push_back({kind, NbParams{1e-9}}); break;
    }
    return grid;
}

TuneResult tune(const std::vector<ClassifierSpec>& grid, const Matrix& x, std::span<const Label> y, int folds,
                std::uint64_t seed) {
    if (grid.empty()) throw ConfigError("tuning grid is empty");
    if (folds < 2) throw ConfigError("tuning needs at least 2 folds");
    check_fit_input(x, y);
    const auto fold = stratified_folds(y, folds, seed);

    std::vector<Matrix> train_x(static_cast<std::size_t>(folds)), valid_x(static_cast<std::size_t>(folds));
    std::vector<std::vector<Label>> train_y(static_cast<std::size_t>(folds)), valid_y(static_cast<std::size_t>(folds));
    for (int f = 0; f < folds; ++f) {
        std::vector<std::size_t> tr, va;
        for (std::size_t i = 0; i < y.size(); ++i) (fold[i] == f ? va : tr).push_back(i);
        auto take = [&](const std::vector<std::size_t>& rows, Matrix& mx, std::vector<Label>& my) {
            mx.resize(static_cast<Eigen::Index>(rows.size()), x.cols());
            for (std::size_t r = 0; r < rows.size(); ++r) {
                mx.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(rows[r]));
                my.push_back(y[rows[r]]);
            }
        };
        take(tr, train_x[static_cast<std::size_t>(f)], train_y[static_cast<std::size_t>(f)]);
        take(va, valid_x[static_cast<std::size_t>(f)], valid_y[static_cast<std::size_t>(f)]);
    }

    // scores[g][f] is the F1 of grid point g on fold f; NaN marks a failed fit.
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::vector<double>> fold_scores(grid.size(), std::vector<double>(static_cast<std::size_t>(folds), nan));
    for (int f = 0; f < folds; ++f) {
        const auto fi = static_cast<std::size_t>(f);
        const Matrix& tx = train_x[fi];
        const Matrix& vx = valid_x[fi];
        const auto& ty = train_y[fi];
        const auto& vy = valid_y[fi];
        std::vector<bool> done(grid.size(), false);

        // kNN: one neighbour search at the largest k serves every k.
        std::size_t kmax = 0;
        for (const auto& g : grid)
            if (g.kind == ClassifierKind::Knn) kmax = std::max<std::size_t>(kmax, static_cast<std::size_t>(g.get<KnnParams>().k));
        if (kmax > 0) {
            std::vector<std::vector<Neighbor>> lists(static_cast<std::size_t>(vx.rows()));
            for (Eigen::Index i = 0; i < vx.rows(); ++i) {
                const RowVector q = vx.row(i);
                lists[static_cast<std::size_t>(i)] = nearest_rows(tx, q.data(), kmax);
            }
            for (std::size_t g = 0; g < grid.size(); ++g) {
                if (grid[g].kind != ClassifierKind::Knn) continue;
                const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(grid[g].get<KnnParams>().k), ty.size());
                std::vector<Label> pred(vy.size());
                for (std::size_t i = 0; i < pred.size(); ++i) {
                    std::size_t peaks = 0;
                    for (std::size_t n = 0; n < k; ++n) peaks += ty[lists[i][n].index] == Label::Peak;
                    const double pp = knn_peak_posterior(peaks, k);
                    pred[i] = argmax_label(1.0 - pp, pp);
                }
                fold_scores[g][fi] = f1_score(vy, pred);
                done[g] = true;
            }
        }

        // Ridge ELM: grid points sharing hidden weights share H, H'H and H't.
        for (std::size_t g = 0; g < grid.size(); ++g) {
            if (done[g] || grid[g].kind != ClassifierKind::Elm) continue;
            const auto& p = grid[g].get<ElmParams>();
            if (!(p.ridge > 0.0)) continue;
            const ElmWeights w = elm_random_weights(p, tx.cols());
            const Matrix h = elm_hidden(w, p.activation, tx);
            const Matrix hv = elm_hidden(w, p.activation, vx);
            Vector t(tx.rows());
            for (Eigen::Index i = 0; i < tx.rows(); ++i) t(i) = elm_target(ty[static_cast<std::size_t>(i)]);
            Eigen::MatrixXd gram = elm_gram(h);
            const Vector rhs = h.transpose() * t;
            for (std::size_t g2 = g; g2 < grid.size(); ++g2) {
                if (done[g2] || grid[g2].kind != ClassifierKind::Elm) continue;
                const auto& p2 = grid[g2].get<ElmParams>();
                if (!(p2.ridge > 0.0) || p2.hidden_units != p.hidden_units || p2.activation != p.activation ||
                    p2.weight_seed != p.weight_seed)
                    continue;
                done[g2] = true;
                try {
                    const Vector beta = elm_solve_gram(gram, rhs, p2.ridge);
                    const Vector o = hv * beta;
                    std::vector<Label> pred(vy.size());
                    for (std::size_t i = 0; i < pred.size(); ++i) {
                        const double pp = elm_peak_posterior(o(static_cast<Eigen::Index>(i)));
                        pred[i] = argmax_label(1.0 - pp, pp);
                    }
                    fold_scores[g2][fi] = f1_score(vy, pred);
                } catch (const NumericError&) {
                }
            }
        }

        for (std::size_t g = 0; g < grid.size(); ++g) {
            if (done[g]) continue;
            try {
                const auto model = fit(grid[g], tx, ty);
                fold_scores[g][fi] = f1_score(vy, model.predict(vx));
            } catch (const DataError&) {
            } catch (const NumericError&) {
            }
        }
    }

    TuneResult result;
    result.best_score = -1.0;
    std::size_t best = grid.size();
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double total = 0.0;
        bool ok = true;
        for (double v : fold_scores[g]) {
            ok = ok && std::isfinite(v);
            total += v;
        }
        const double score = ok ? total / folds : nan;
        result.scores.push_back(score);
        if (ok && score > result.best_score) {
            result.best_score = score;
            best = g;
        }
    }
    if (best == grid.size()) throw DataError("every tuning grid point failed to fit");
    result.best = grid[best];
    return result;
}

TuneResult tune(const std::vector<ClassifierSpec>& grid, const FeatureMatrix& m, int folds, std::uint64_t seed) {
    return tune(grid, m.values, m.labels, folds, seed);
}

}  // namespace prach
