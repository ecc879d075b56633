#pragma once

#include "prach/core.hpp"

#include <cstdint>
#include <random>

namespace prach {

// Synthetic detection-candidate generator settings. Defaults follow the
// measurement setup: SNR 10 dB, Ncs 13, 1000 preamble sequences, 8% Peaks.
struct GenConfig {
    std::size_t n_records = 10000;
    double peak_fraction = 0.08;
    double snr_db = 10.0;
    int ncs = 13;
    int n_sequences = 1000;
    std::uint64_t seed = 1;
    int zc_length = 139;

    // Records are collected in contiguous sessions. Session s of S gets a
    // noise-floor offset and an SNR offset spread linearly over the spans
    // below, centred on 0 dB and snr_db respectively.
    int n_sessions = 2;
    double session_floor_span_db = 6.0;
    double session_snr_span_db = 20.0;
    // Per-record uniform jitter (+/- dB) on both the noise floor and the SNR.
    double jitter_db = 0.5;
    // Detection threshold = threshold_scale * sqrt(floor variance).
    double threshold_scale = 5.5;

    void validate() const;
    bool operator==(const GenConfig&) const = default;
};

struct SessionCondition {
    double noise_floor_db = 0.0;
    double snr_offset_db = 0.0;
};

SessionCondition session_condition(const GenConfig& cfg, std::size_t record_index);
std::size_t expected_peak_count(const GenConfig& cfg);

// One candidate: correlate a received window against the ZC replica under
// AWGN. Peak windows carry a delayed preamble (delay uniform in [0, Ncs));
// FalsePeak windows are noise only. The label is the simulation ground truth.
FeatureRecord simulate_candidate(const GenConfig& cfg, bool is_peak,
                                 const SessionCondition& condition, std::mt19937_64& rng);
FeatureRecord simulate_candidate(const GenConfig& cfg, bool is_peak, std::mt19937_64& rng);

// Raw (un-normalized) records in generation order.
std::vector<FeatureRecord> generate_records(const GenConfig& cfg);

// Mean normalization per feature: (x - mean) / (max - min).
std::vector<FeatureRecord> mean_normalize(std::vector<FeatureRecord> records);

// Generated, mean-normalized dataset. Pure function of cfg.
Dataset generate_dataset(const GenConfig& cfg);

}  // namespace prach
