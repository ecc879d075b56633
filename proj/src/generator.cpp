#include "prach/generator.hpp"

#include "prach/zc.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

namespace prach {

namespace {

std::vector<int> coprime_roots(int length) {
    std::vector<int> roots;
    for (int u = 1; u < length; ++u)
        if (std::gcd(u, length) == 1) roots.push_back(u);
    return roots;
}

double linspace_at(double span, int count, int index) {
    if (count <= 1) return 0.0;
    return -span / 2.0 + span * static_cast<double>(index) / static_cast<double>(count - 1);
}

}  // namespace

void GenConfig::validate() const {
    if (n_records == 0) throw ConfigError("n_records must be positive");
    if (!(peak_fraction > 0.0 && peak_fraction < 1.0))
        throw ConfigError("peak_fraction must lie in (0,1)");
    if (!std::isfinite(snr_db)) throw ConfigError("snr_db must be finite");
    if (zc_length < 3 || zc_length % 2 == 0) throw ConfigError("zc_length must be odd and >= 3");
    if (ncs < 1 || ncs >= zc_length) throw ConfigError("ncs must lie in [1, zc_length)");
    if (n_sequences < 1) throw ConfigError("n_sequences must be positive");
    const auto roots = coprime_roots(zc_length).size();
    const auto shifts = static_cast<std::size_t>(zc_length / ncs);
    if (static_cast<std::size_t>(n_sequences) > roots * shifts)
        throw ConfigError("n_sequences exceeds the " + std::to_string(roots * shifts) +
                          " distinct root/cyclic-shift pairs available");
    if (n_sessions < 1) throw ConfigError("n_sessions must be positive");
    if (!(jitter_db >= 0.0)) throw ConfigError("jitter_db must be nonnegative");
    if (!(threshold_scale > 0.0)) throw ConfigError("threshold_scale must be positive");
    if (!std::isfinite(session_floor_span_db) || !std::isfinite(session_snr_span_db))
        throw ConfigError("session spans must be finite");
}

SessionCondition session_condition(const GenConfig& cfg, std::size_t record_index) {
    const auto s = static_cast<int>(record_index * static_cast<std::size_t>(cfg.n_sessions) /
                                    cfg.n_records);
    return {linspace_at(cfg.session_floor_span_db, cfg.n_sessions, s),
            linspace_at(cfg.session_snr_span_db, cfg.n_sessions, s)};
}

std::size_t expected_peak_count(const GenConfig& cfg) {
    return static_cast<std::size_t>(std::llround(static_cast<double>(cfg.n_records) * cfg.peak_fraction));
}

FeatureRecord simulate_candidate(const GenConfig& cfg, bool is_peak,
                                 const SessionCondition& condition, std::mt19937_64& rng) {
    const int n = cfg.zc_length;
    const auto roots = coprime_roots(n);
    std::uniform_int_distribution<int> pick_seq(0, cfg.n_sequences - 1);
    std::uniform_real_distribution<double> jitter(-cfg.jitter_db, cfg.jitter_db);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const int seq = pick_seq(rng);
    const int root = roots[static_cast<std::size_t>(seq) % roots.size()];
    const int cyclic_shift = (seq / static_cast<int>(roots.size())) * cfg.ncs;
    const ZcSequence zc = generate_zc(root, n);

    const double noise_power = std::pow(10.0, (condition.noise_floor_db + jitter(rng)) / 10.0);
    const double noise_scale = std::sqrt(noise_power / 2.0);
    std::vector<std::complex<double>> rx(static_cast<std::size_t>(n));
    for (auto& s : rx) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        s = {re * noise_scale, im * noise_scale};
    }

    if (is_peak) {
        const double snr = cfg.snr_db + condition.snr_offset_db + jitter(rng);
        const double amp = std::sqrt(std::pow(10.0, snr / 10.0) * noise_power);
        const int delay = std::uniform_int_distribution<int>(0, cfg.ncs - 1)(rng);
        const double phase = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
        const std::complex<double> gain = std::polar(amp, phase);
        for (int k = 0; k < n; ++k) {
            const int src = ((k - cyclic_shift - delay) % n + n) % n;
            rx[static_cast<std::size_t>(k)] += gain * zc.samples[static_cast<std::size_t>(src)];
        }
    }

    // Circular correlation against the replica at this cyclic shift; lags
    // [0, Ncs) form the detection window, the rest is the floor.
    double peak = 0.0;
    double floor_power = 0.0;
    for (int lag = 0; lag < n; ++lag) {
        std::complex<double> acc{0.0, 0.0};
        const int offset = cyclic_shift + lag;
        for (int k = 0; k < n; ++k) {
            const int src = ((k - offset) % n + n) % n;
            acc += rx[static_cast<std::size_t>(k)] * std::conj(zc.samples[static_cast<std::size_t>(src)]);
        }
        acc /= static_cast<double>(n);
        if (lag < cfg.ncs)
            peak = std::max(peak, std::abs(acc));
        else
            floor_power += std::norm(acc);
    }
    const double variance = floor_power / static_cast<double>(n - cfg.ncs);

    FeatureRecord rec;
    rec.amplitude = peak;
    rec.variance = variance;
    rec.threshold = cfg.threshold_scale * std::sqrt(variance);
    rec.snr = 10.0 * std::log10(peak * peak / (static_cast<double>(n) * variance));
    rec.label = is_peak ? Label::Peak : Label::FalsePeak;
    return rec;
}

FeatureRecord simulate_candidate(const GenConfig& cfg, bool is_peak, std::mt19937_64& rng) {
    return simulate_candidate(cfg, is_peak, SessionCondition{0.0, 0.0}, rng);
}

std::vector<FeatureRecord> generate_records(const GenConfig& cfg) {
    cfg.validate();
    const std::size_t n = cfg.n_records;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 label_rng(derive_seed(cfg.seed, {hash_tag("labels")}));
    std::shuffle(order.begin(), order.end(), label_rng);
    std::vector<bool> is_peak(n, false);
    const std::size_t n_peak = expected_peak_count(cfg);
    for (std::size_t i = 0; i < n_peak; ++i) is_peak[order[i]] = true;

    // Each record owns a sub-stream keyed by its index.
    std::vector<FeatureRecord> records(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::mt19937_64 rng(derive_seed(cfg.seed, {hash_tag("record"), i}));
        records[i] = simulate_candidate(cfg, is_peak[i], session_condition(cfg, i), rng);
    }
    return records;
}

std::vector<FeatureRecord> mean_normalize(std::vector<FeatureRecord> records) {
    if (records.empty()) return records;
    const double n = static_cast<double>(records.size());
    for (int j = 0; j < kNumFeatures; ++j) {
        double sum = 0.0;
        double lo = records.front().feature(j);
        double hi = lo;
        for (const auto& r : records) {
            const double v = r.feature(j);
            sum += v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        const double mean = sum / n;
        const double range = hi - lo;
        for (auto& r : records) {
            const double centred = r.feature(j) - mean;
            r.feature(j) = range > 0.0 ? centred / range : centred;
        }
    }
    return records;
}

Dataset generate_dataset(const GenConfig& cfg) {
    Provenance prov;
    prov.gen_seed = cfg.seed;
    prov.mean_normalized = true;
    return Dataset(mean_normalize(generate_records(cfg)), prov);
}

}  // namespace prach
