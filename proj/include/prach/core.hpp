#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace prach {

// Class order is fixed everywhere: column 0 is FalsePeak, column 1 is Peak.
enum class Label : std::uint8_t { FalsePeak = 0, Peak = 1 };

constexpr int kNumClasses = 2;

inline constexpr std::string_view to_string(Label l) {
    return l == Label::Peak ? "Peak" : "FalsePeak";
}
Label parse_label(std::string_view s);
inline Label toggled(Label l) { return l == Label::Peak ? Label::FalsePeak : Label::Peak; }
inline int class_index(Label l) { return static_cast<int>(l); }

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
// N x 2 class posteriors, columns in class order.
using Posterior = Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor>;

// Error categories map one-to-one onto CLI exit codes.
enum class ErrorCategory { Config = 2, Io = 3, Data = 4, Numeric = 5 };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}
    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& w) : Error(ErrorCategory::Config, w) {}
};
struct IoError : Error {
    explicit IoError(const std::string& w) : Error(ErrorCategory::Io, w) {}
};
struct DataError : Error {
    explicit DataError(const std::string& w) : Error(ErrorCategory::Data, w) {}
};
struct NumericError : Error {
    explicit NumericError(const std::string& w) : Error(ErrorCategory::Numeric, w) {}
};
// Row/column counts that do not line up.
struct DimensionMismatch : DataError {
    explicit DimensionMismatch(const std::string& w) : DataError(w) {}
};
// Training input a learner cannot fit, e.g. a single class.
struct DegenerateInput : DataError {
    explicit DegenerateInput(const std::string& w) : DataError(w) {}
};

constexpr int kNumFeatures = 4;
inline constexpr const char* kFeatureNames[kNumFeatures] = {"amplitude", "variance", "threshold",
                                                            "snr"};

struct FeatureRecord {
    double amplitude = 0.0;  // correlation peak magnitude
    double variance = 0.0;   // correlation floor variance
    double threshold = 0.0;  // adaptive detection threshold
    double snr = 0.0;        // estimated SNR, dB
    Label label = Label::FalsePeak;

    double feature(int j) const;
    double& feature(int j);
    bool operator==(const FeatureRecord&) const = default;
};

enum class NoiseMode { FeatureAwgn, LabelFlip };
std::string_view to_string(NoiseMode m);
NoiseMode parse_noise_mode(std::string_view s);

struct NoiseProvenance {
    NoiseMode mode = NoiseMode::FeatureAwgn;
    double fraction = 0.0;
    std::uint64_t seed = 0;
    double sigma = 0.0;
    std::size_t corrupted = 0;
    bool operator==(const NoiseProvenance&) const = default;
};

struct Provenance {
    std::optional<std::uint64_t> gen_seed;
    bool mean_normalized = false;
    std::vector<NoiseProvenance> noise;  // in application order
    bool operator==(const Provenance&) const = default;
};

// Ordered, immutable set of candidate records.
class Dataset {
public:
    Dataset() = default;
    Dataset(std::vector<FeatureRecord> records, Provenance provenance)
        : records_(std::move(records)), provenance_(std::move(provenance)) {}

    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }
    const FeatureRecord& operator[](std::size_t i) const { return records_[i]; }
    std::span<const FeatureRecord> records() const { return records_; }
    const Provenance& provenance() const { return provenance_; }

    std::size_t count(Label l) const;
    std::vector<Label> labels() const;
    // N x 4 feature matrix in column order amplitude, variance, threshold, snr.
    Matrix features() const;
    Dataset subset(std::span<const std::size_t> rows) const;

    bool operator==(const Dataset&) const = default;

private:
    std::vector<FeatureRecord> records_;
    Provenance provenance_;
};

enum class SpaceTag { Raw, Psr, Pca };
std::string_view to_string(SpaceTag s);
SpaceTag parse_space(std::string_view s);

// A transformed view of a dataset, row-aligned with its labels.
struct FeatureMatrix {
    Matrix values;
    std::vector<Label> labels;
    SpaceTag space = SpaceTag::Raw;

    FeatureMatrix() = default;
    FeatureMatrix(Matrix v, std::vector<Label> l, SpaceTag s);

    std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }
    FeatureMatrix subset(std::span<const std::size_t> rows) const;
};

FeatureMatrix raw_matrix(const Dataset& ds);

// Deterministic seed derivation (splitmix64 over a running state).
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts);
std::uint64_t hash_tag(std::string_view tag);

}  // namespace prach
