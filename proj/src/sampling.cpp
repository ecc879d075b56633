#include "prach/sampling.hpp"

#include "prach/knn.hpp"
#include "prach/learner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace prach {

std::string_view to_string(UncertaintyMode m) {
    return m == UncertaintyMode::LeastConfidence ? "least_confidence" : "margin";
}

UncertaintyMode parse_uncertainty_mode(std::string_view s) {
    if (s == "least_confidence") return UncertaintyMode::LeastConfidence;
    if (s == "margin") return UncertaintyMode::Margin;
    throw ConfigError("unknown uncertainty mode '" + std::string(s) + "'");
}

void SamplingConfig::validate() const {
    if (!(initial_fraction > 0.0 && initial_fraction < 1.0)) throw ConfigError("initial_fraction must lie in (0,1)");
    if (j < 1) throw ConfigError("sampling budget J must be >= 1");
    if (k_density < 1) throw ConfigError("k_density must be >= 1");
}

namespace {

// Mean of the square roots of the first k squared distances, summed in order.
double density_from_sorted(const std::vector<double>& sq, std::size_t k) {
    if (k == 0) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += std::sqrt(sq[i]);
    return 1.0 / (kDensityEpsilon + sum / static_cast<double>(k));
}

[[noreturn]] void rethrow_in_cycle(const Error& e, std::size_t cycle) {
    const std::string msg = "self-training cycle " + std::to_string(cycle) + ": " + e.what();
    switch (e.category()) {
        case ErrorCategory::Config: throw ConfigError(msg);
        case ErrorCategory::Io: throw IoError(msg);
        case ErrorCategory::Data: throw DataError(msg);
        case ErrorCategory::Numeric: throw NumericError(msg);
    }
    throw DataError(msg);
}

}  // namespace

double knn_density(const RowVector& x, const Matrix& pool, int k) {
    if (k < 1) throw ConfigError("density k must be >= 1");
    if (pool.rows() < k) throw DataError("density needs at least k pool rows");
    if (pool.cols() != x.size()) throw DimensionMismatch("density query width differs from pool");
    const auto top = nearest_rows(pool, x.data(), static_cast<std::size_t>(k));
    std::vector<double> sq;
    for (const auto& nb : top) sq.push_back(nb.dist);
    return density_from_sorted(sq, sq.size());
}

double uncertainty_from_posterior(double p_false, double p_peak, UncertaintyMode mode) {
    double u = mode == UncertaintyMode::LeastConfidence ? (1.0 - std::max(p_false, p_peak)) / 0.5
                                                        : 1.0 - std::abs(p_peak - p_false);
    return std::clamp(u, 0.0, 1.0);
}

double uncertainty(const TrainedModel& model, const RowVector& x, UncertaintyMode mode) {
    const Posterior p = model.posterior(Matrix(x));
    return uncertainty_from_posterior(p(0, 0), p(0, 1), mode);
}

std::vector<double> minmax_normalize(std::span<const double> v) {
    std::vector<double> out(v.size(), 1.0);
    if (v.empty()) return out;
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    const double range = *hi - *lo;
    if (!(range > 0.0)) return out;
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - *lo) / range;
    return out;
}

std::vector<ScoredInstance> rank_informative(std::span<const double> raw_density,
                                             std::span<const double> raw_uncertainty, std::size_t budget) {
    if (raw_density.size() != raw_uncertainty.size()) throw DimensionMismatch("density and uncertainty lengths differ");
    const auto dn = minmax_normalize(raw_density);
    const auto un = minmax_normalize(raw_uncertainty);
    std::vector<ScoredInstance> all(raw_density.size());
    for (std::size_t i = 0; i < all.size(); ++i)
        all[i] = {i, dn[i], un[i], dn[i] * un[i], raw_density[i], raw_uncertainty[i]};
    const std::size_t keep = std::min(budget, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(),
                      [](const ScoredInstance& a, const ScoredInstance& b) {
                          if (a.informativeness != b.informativeness) return a.informativeness > b.informativeness;
                          return a.row_index < b.row_index;
                      });
    all.resize(keep);
    return all;
}

std::vector<double> pool_densities(const Matrix& pool, int k) {
    const auto n = static_cast<std::size_t>(pool.rows());
    const std::size_t keff = n == 0 ? 0 : std::min<std::size_t>(static_cast<std::size_t>(k), n - 1);
    std::vector<double> out(n, 0.0);
    std::vector<Neighbor> top;
    std::vector<double> sq;
    for (std::size_t i = 0; i < n; ++i) {
        top.clear();
        for (std::size_t j = 0; j < n; ++j)
            if (j != i)
                push_neighbor(top,
                              {squared_distance(pool.row(static_cast<Eigen::Index>(std::min(i, j))).data(),
                                                pool.row(static_cast<Eigen::Index>(std::max(i, j))).data(), pool.cols()),
                               static_cast<std::uint32_t>(j)},
                              keff);
        sq.clear();
        for (const auto& nb : top) sq.push_back(nb.dist);
        out[i] = density_from_sorted(sq, keff);
    }
    return out;
}

std::vector<ScoredInstance> select_informative(const FeatureMatrix& pool, const TrainedModel& model,
                                               const SamplingConfig& cfg) {
    cfg.validate();
    if (pool.rows() == 0) return {};
    const auto dens = pool_densities(pool.values, cfg.k_density);
    const Posterior p = model.posterior(pool.values);
    std::vector<double> unc(pool.rows());
    for (std::size_t i = 0; i < unc.size(); ++i)
        unc[i] = uncertainty_from_posterior(p(static_cast<Eigen::Index>(i), 0), p(static_cast<Eigen::Index>(i), 1),
                                            cfg.uncertainty);
    return rank_informative(dens, unc, static_cast<std::size_t>(cfg.j));
}

DensityTracker::DensityTracker(const Matrix& pool, int k, std::size_t cache)
    : pool_(&pool), k_(k), cache_(std::max<std::size_t>(cache, static_cast<std::size_t>(k))),
      caches_(static_cast<std::size_t>(pool.rows())), dead_(static_cast<std::size_t>(pool.rows()), 0),
      alive_(static_cast<std::size_t>(pool.rows())) {
    if (k < 1) throw ConfigError("density k must be >= 1");
    const auto n = alive_;
    const auto d = pool.cols();
    for (auto& c : caches_) {
        c.list.reserve(cache_ + 1);
        c.complete = n - 1 <= cache_;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double* a = pool.row(static_cast<Eigen::Index>(i)).data();
        auto& li = caches_[i].list;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double s = squared_distance(a, pool.row(static_cast<Eigen::Index>(j)).data(), d);
            push_neighbor(li, {s, static_cast<std::uint32_t>(j)}, cache_);
            push_neighbor(caches_[j].list, {s, static_cast<std::uint32_t>(i)}, cache_);
        }
    }
}

void DensityTracker::remove(std::span<const std::size_t> rows) {
    for (auto r : rows) {
        if (r >= dead_.size() || dead_[r]) throw DataError("density tracker: row removed twice or out of range");
        dead_[r] = 1;
        --alive_;
    }
}

void DensityTracker::rescan(std::size_t row) {
    ++rescans_;
    auto& c = caches_[row];
    c.list.clear();
    const Matrix& pool = *pool_;
    for (std::size_t j = 0; j < dead_.size(); ++j) {
        if (j == row || dead_[j]) continue;
        const double s = squared_distance(pool.row(static_cast<Eigen::Index>(std::min(row, j))).data(),
                                          pool.row(static_cast<Eigen::Index>(std::max(row, j))).data(), pool.cols());
        push_neighbor(c.list, {s, static_cast<std::uint32_t>(j)}, cache_);
    }
    c.complete = alive_ - 1 <= cache_;
}

double DensityTracker::density_of(std::size_t row) {
    const std::size_t keff = std::min<std::size_t>(static_cast<std::size_t>(k_), alive_ - 1);
    std::vector<double> sq;
    sq.reserve(keff);
    for (int attempt = 0; attempt < 2; ++attempt) {
        sq.clear();
        for (const auto& nb : caches_[row].list) {
            if (sq.size() == keff) break;
            if (!dead_[nb.index]) sq.push_back(nb.dist);
        }
        if (sq.size() == keff) break;
        rescan(row);
    }
    return density_from_sorted(sq, keff);
}

std::vector<double> DensityTracker::densities(std::span<const std::size_t> rows) {
    std::vector<double> out;
    out.reserve(rows.size());
    for (auto r : rows) {
        if (dead_[r]) throw DataError("density requested for a removed row");
        out.push_back(density_of(r));
    }
    return out;
}

std::size_t expected_cycles(std::size_t pool_size, int j) {
    return (pool_size + static_cast<std::size_t>(j) - 1) / static_cast<std::size_t>(j);
}

SelfTrainResult self_train(const FeatureMatrix& train0, const FeatureMatrix& pool, const ClassifierSpec& spec,
                           const SamplingConfig& cfg, const DensityTracker* tracker, bool incremental) {
    cfg.validate();
    if (train0.rows() == 0) throw DataError("self-training needs a nonempty initial training set");
    if (pool.rows() > 0 && pool.cols() != train0.cols()) throw DimensionMismatch("pool width differs from training width");

    SelfTrainResult result;
    std::size_t cycle = 0;
    try {
        auto session = make_session(spec, train0.values, train0.labels, pool.values, incremental);
        if (pool.rows() == 0) {
            result.model = session->model();
            result.fits = 1;
            return result;
        }
        DensityTracker local = tracker ? *tracker : DensityTracker(pool.values, cfg.k_density);
        if (local.alive() != pool.rows()) throw DataError("density tracker does not match the pool");

        std::vector<std::size_t> alive(pool.rows());
        std::iota(alive.begin(), alive.end(), std::size_t{0});
        const auto budget = static_cast<std::size_t>(cfg.j);
        while (!alive.empty()) {
            ++cycle;
            const Posterior post = session->pool_posterior(alive);
            ++result.fits;
            std::vector<double> unc(alive.size());
            for (std::size_t i = 0; i < alive.size(); ++i)
                unc[i] = uncertainty_from_posterior(post(static_cast<Eigen::Index>(i), 0),
                                                    post(static_cast<Eigen::Index>(i), 1), cfg.uncertainty);
            const auto dens = local.densities(alive);
            const auto picked = rank_informative(dens, unc, budget);

            CycleLog log;
            log.cycle = cycle;
            double info = 0.0;
            std::vector<char> take(alive.size(), 0);
            for (const auto& s : picked) {
                const auto pos = s.row_index;
                take[pos] = 1;
                const auto row = alive[pos];
                log.moved.push_back(row);
                log.pseudo_labels.push_back(argmax_label(post(static_cast<Eigen::Index>(pos), 0),
                                                         post(static_cast<Eigen::Index>(pos), 1)));
                log.true_labels.push_back(pool.labels[row]);
                info += s.informativeness;
            }
            log.mean_informativeness = picked.empty() ? 0.0 : info / static_cast<double>(picked.size());
            session->add(log.moved, log.pseudo_labels);
            local.remove(log.moved);
            std::size_t w = 0;
            for (std::size_t i = 0; i < alive.size(); ++i)
                if (!take[i]) alive[w++] = alive[i];
            alive.resize(w);
            log.train_size = session->train_size();
            result.cycles.push_back(std::move(log));
        }
        result.model = session->model();
        ++result.fits;
    } catch (const Error& e) {
        rethrow_in_cycle(e, cycle);
    }
    return result;
}

void write_audit_csv(const std::vector<CycleLog>& cycles, std::ostream& os) {
    os << "cycle,train_size,moved,mean_informativeness,pseudo_peaks,true_peaks,pseudo_label_errors,moved_rows\n";
    for (const auto& c : cycles) {
        std::size_t pp = 0, tp = 0, err = 0;
        for (std::size_t i = 0; i < c.moved.size(); ++i) {
            pp += c.pseudo_labels[i] == Label::Peak;
            tp += c.true_labels[i] == Label::Peak;
            err += c.pseudo_labels[i] != c.true_labels[i];
        }
        os << c.cycle << ',' << c.train_size << ',' << c.moved.size() << ',' << c.mean_informativeness << ',' << pp
           << ',' << tp << ',' << err << ',';
        for (std::size_t i = 0; i < c.moved.size(); ++i) os << (i ? ";" : "") << c.moved[i];
        os << '\n';
    }
}

}  // namespace prach
