#pragma once

#include "prach/core.hpp"

#include <memory>
#include <variant>

#include <json.hpp>

namespace prach {

enum class ClassifierKind { DecisionTree, Knn, Elm, GaussianNb };
std::string_view to_string(ClassifierKind k);
ClassifierKind parse_classifier_kind(std::string_view s);

struct TreeParams {
    int max_depth = 0;  // 0 = unbounded
    int min_leaf = 1;
    bool operator==(const TreeParams&) const = default;
};

struct KnnParams {
    int k = 5;
    bool operator==(const KnnParams&) const = default;
};

enum class Activation { Sigmoid, Tanh };
std::string_view to_string(Activation a);
Activation parse_activation(std::string_view s);

struct ElmParams {
    int hidden_units = 128;
    double ridge = 1e-3;
    Activation activation = Activation::Sigmoid;
    std::uint64_t weight_seed = 1;
    bool operator==(const ElmParams&) const = default;
};

struct NbParams {
    double var_floor = 1e-9;  // added to every per-class variance
    bool operator==(const NbParams&) const = default;
};

using ClassifierParams = std::variant<TreeParams, KnnParams, ElmParams, NbParams>;

struct ClassifierSpec {
    ClassifierKind kind = ClassifierKind::DecisionTree;
    ClassifierParams params = TreeParams{};

    static ClassifierSpec defaults(ClassifierKind kind);
    void validate() const;
    std::string describe() const;
    bool operator==(const ClassifierSpec&) const = default;

    template <class P>
    const P& get() const { return std::get<P>(params); }
};

nlohmann::json spec_to_json(const ClassifierSpec& s);
ClassifierSpec spec_from_json(const nlohmann::json& j);

// Fitted state behind a TrainedModel.
class ModelImpl {
public:
    virtual ~ModelImpl() = default;
    virtual std::size_t input_dim() const = 0;
    // Rows are nonnegative and sum to 1.
    virtual Posterior posterior(const Matrix& x) const = 0;
    virtual nlohmann::json state_to_json() const = 0;
};

class TrainedModel {
public:
    TrainedModel() = default;
    TrainedModel(ClassifierSpec spec, std::shared_ptr<const ModelImpl> impl)
        : spec_(std::move(spec)), impl_(std::move(impl)) {}

    const ClassifierSpec& spec() const { return spec_; }
    bool fitted() const { return impl_ != nullptr; }
    const ModelImpl& impl() const;
    std::size_t input_dim() const { return impl().input_dim(); }

    Posterior posterior(const Matrix& x) const;
    std::vector<Label> predict(const Matrix& x) const;
    Posterior posterior(const FeatureMatrix& m) const { return posterior(m.values); }
    std::vector<Label> predict(const FeatureMatrix& m) const { return predict(m.values); }

private:
    ClassifierSpec spec_;
    std::shared_ptr<const ModelImpl> impl_;
};

// Argmax per row, ties to FalsePeak.
Label argmax_label(double p_false, double p_peak);
std::vector<Label> labels_from_posterior(const Posterior& p);

TrainedModel fit(const ClassifierSpec& spec, const Matrix& x, std::span<const Label> y);
TrainedModel fit(const ClassifierSpec& spec, const FeatureMatrix& m);

nlohmann::json model_to_json(const TrainedModel& m);
TrainedModel model_from_json(const nlohmann::json& j);
void save_model(const TrainedModel& m, const std::string& path);
TrainedModel load_model(const std::string& path);

// Shared input checks.
void check_fit_input(const Matrix& x, std::span<const Label> y);
void check_dim(std::size_t expected, const Matrix& x);

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

}  // namespace prach
