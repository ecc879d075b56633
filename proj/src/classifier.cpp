#include "prach/classifier.hpp"

#include "prach/decision_tree.hpp"
#include "prach/elm.hpp"
#include "prach/gaussian_nb.hpp"
#include "prach/knn.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace prach {

std::string_view to_string(ClassifierKind k) {
    switch (k) {
        case ClassifierKind::DecisionTree: return "DecisionTree";
        case ClassifierKind::Knn: return "Knn";
        case ClassifierKind::Elm: return "Elm";
        case ClassifierKind::GaussianNb: return "GaussianNb";
    }
    return "?";
}

ClassifierKind parse_classifier_kind(std::string_view s) {
    if (s == "DecisionTree" || s == "tree" || s == "dt") return ClassifierKind::DecisionTree;
    if (s == "Knn" || s == "knn") return ClassifierKind::Knn;
    if (s == "Elm" || s == "elm") return ClassifierKind::Elm;
    if (s == "GaussianNb" || s == "nb") return ClassifierKind::GaussianNb;
    throw ConfigError("unknown classifier '" + std::string(s) + "'");
}

std::string_view to_string(Activation a) { return a == Activation::Sigmoid ? "sigmoid" : "tanh"; }

Activation parse_activation(std::string_view s) {
    if (s == "sigmoid") return Activation::Sigmoid;
    if (s == "tanh") return Activation::Tanh;
    throw ConfigError("unknown activation '" + std::string(s) + "'");
}

ClassifierSpec ClassifierSpec::defaults(ClassifierKind kind) {
    switch (kind) {
        case ClassifierKind::DecisionTree: return {kind, TreeParams{}};
        case ClassifierKind::Knn: return {kind, KnnParams{}};
        case ClassifierKind::Elm: return {kind, ElmParams{}};
        case ClassifierKind::GaussianNb: return {kind, NbParams{}};
    }
    throw ConfigError("unknown classifier kind");
}

void ClassifierSpec::validate() const {
    const bool match = (kind == ClassifierKind::DecisionTree && std::holds_alternative<TreeParams>(params)) ||
                       (kind == ClassifierKind::Knn && std::holds_alternative<KnnParams>(params)) ||
                       (kind == ClassifierKind::Elm && std::holds_alternative<ElmParams>(params)) ||
                       (kind == ClassifierKind::GaussianNb && std::holds_alternative<NbParams>(params));
    if (!match) throw ConfigError("parameters do not match classifier kind " + std::string(to_string(kind)));
    switch (kind) {
        case ClassifierKind::DecisionTree: {
            const auto& p = get<TreeParams>();
            if (p.max_depth < 0) throw ConfigError("tree max_depth must be >= 0 (0 = unbounded)");
            if (p.min_leaf < 1) throw ConfigError("tree min_leaf must be >= 1");
            break;
        }
        case ClassifierKind::Knn:
            if (get<KnnParams>().k < 1) throw ConfigError("knn k must be >= 1");
            break;
        case ClassifierKind::Elm: {
            const auto& p = get<ElmParams>();
            if (p.hidden_units < 1) throw ConfigError("elm hidden_units must be >= 1");
            if (!(p.ridge >= 0.0) || !std::isfinite(p.ridge)) throw ConfigError("elm ridge must be >= 0");
            break;
        }
        case ClassifierKind::GaussianNb: {
            const double f = get<NbParams>().var_floor;
            if (!(f >= 0.0) || !std::isfinite(f)) throw ConfigError("nb var_floor must be >= 0");
            break;
        }
    }
}

std::string ClassifierSpec::describe() const {
    std::ostringstream os;
    os << to_string(kind) << '(';
    switch (kind) {
        case ClassifierKind::DecisionTree: {
            const auto& p = get<TreeParams>();
            os << "max_depth=" << p.max_depth << ",min_leaf=" << p.min_leaf;
            break;
        }
        case ClassifierKind::Knn: os << "k=" << get<KnnParams>().k; break;
        case ClassifierKind::Elm: {
            const auto& p = get<ElmParams>();
            os << "hidden=" << p.hidden_units << ",ridge=" << p.ridge << ",act=" << to_string(p.activation);
            break;
        }
        case ClassifierKind::GaussianNb: os << "var_floor=" << get<NbParams>().var_floor; break;
    }
    os << ')';
    return os.str();
}

nlohmann::json spec_to_json(const ClassifierSpec& s) {
    nlohmann::json j;
    j["kind"] = std::string(to_string(s.kind));
    nlohmann::json p;
    switch (s.kind) {
        case ClassifierKind::DecisionTree:
            p = {{"max_depth", s.get<TreeParams>().max_depth}, {"min_leaf", s.get<TreeParams>().min_leaf}};
            break;
        case ClassifierKind::Knn: p = {{"k", s.get<KnnParams>().k}}; break;
        case ClassifierKind::Elm: {
            const auto& e = s.get<ElmParams>();
            p = {{"hidden_units", e.hidden_units},
                 {"ridge", e.ridge},
                 {"activation", std::string(to_string(e.activation))},
                 {"weight_seed", e.weight_seed}};
            break;
        }
        case ClassifierKind::GaussianNb: p = {{"var_floor", s.get<NbParams>().var_floor}}; break;
    }
    j["params"] = p;
    return j;
}

ClassifierSpec spec_from_json(const nlohmann::json& j) {
    try {
        auto spec = ClassifierSpec::defaults(parse_classifier_kind(j.at("kind").get<std::string>()));
        const nlohmann::json p = j.value("params", nlohmann::json::object());
        switch (spec.kind) {
            case ClassifierKind::DecisionTree: {
                TreeParams t;
                t.max_depth = p.value("max_depth", t.max_depth);
                t.min_leaf = p.value("min_leaf", t.min_leaf);
                spec.params = t;
                break;
            }
            case ClassifierKind::Knn: spec.params = KnnParams{p.value("k", KnnParams{}.k)}; break;
            case ClassifierKind::Elm: {
                ElmParams e;
                e.hidden_units = p.value("hidden_units", e.hidden_units);
                e.ridge = p.value("ridge", e.ridge);
                e.activation = parse_activation(p.value("activation", std::string("sigmoid")));
                e.weight_seed = p.value("weight_seed", e.weight_seed);
                spec.params = e;
                break;
            }
            case ClassifierKind::GaussianNb: spec.params = NbParams{p.value("var_floor", NbParams{}.var_floor)}; break;
        }
        spec.validate();
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed classifier spec: ") + e.what());
    }
}

const ModelImpl& TrainedModel::impl() const {
    if (!impl_) throw DataError("model is not fitted");
    return *impl_;
}

Posterior TrainedModel::posterior(const Matrix& x) const {
    check_dim(impl().input_dim(), x);
    return impl().posterior(x);
}

std::vector<Label> TrainedModel::predict(const Matrix& x) const { return labels_from_posterior(posterior(x)); }

Label argmax_label(double p_false, double p_peak) { return p_peak > p_false ? Label::Peak : Label::FalsePeak; }

std::vector<Label> labels_from_posterior(const Posterior& p) {
    std::vector<Label> out(static_cast<std::size_t>(p.rows()));
    for (Eigen::Index i = 0; i < p.rows(); ++i) out[static_cast<std::size_t>(i)] = argmax_label(p(i, 0), p(i, 1));
    return out;
}

void check_fit_input(const Matrix& x, std::span<const Label> y) {
    if (static_cast<std::size_t>(x.rows()) != y.size())
        throw DimensionMismatch("feature rows (" + std::to_string(x.rows()) + ") and labels (" +
                                std::to_string(y.size()) + ") differ");
    if (x.rows() < 2) throw DegenerateInput("need at least 2 training rows");
    if (x.cols() < 1) throw DimensionMismatch("need at least one feature column");
    if (!x.allFinite()) throw DataError("training features contain non-finite values");
}

void check_dim(std::size_t expected, const Matrix& x) {
    if (static_cast<std::size_t>(x.cols()) != expected)
        throw DimensionMismatch("model expects " + std::to_string(expected) + " columns, got " +
                                std::to_string(x.cols()));
}

TrainedModel fit(const ClassifierSpec& spec, const Matrix& x, std::span<const Label> y) {
    spec.validate();
    check_fit_input(x, y);
    std::shared_ptr<const ModelImpl> impl;
    switch (spec.kind) {
        case ClassifierKind::DecisionTree: impl = fit_tree(spec.get<TreeParams>(), x, y); break;
        case ClassifierKind::Knn: impl = fit_knn(spec.get<KnnParams>(), x, y); break;
        case ClassifierKind::Elm: impl = fit_elm(spec.get<ElmParams>(), x, y); break;
        case ClassifierKind::GaussianNb: impl = fit_nb(spec.get<NbParams>(), x, y); break;
    }
    return TrainedModel(spec, std::move(impl));
}

TrainedModel fit(const ClassifierSpec& spec, const FeatureMatrix& m) { return fit(spec, m.values, m.labels); }

nlohmann::json matrix_to_json(const Matrix& m) {
    nlohmann::json j;
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    j["data"] = std::vector<double>(m.data(), m.data() + m.size());
    return j;
}

Matrix matrix_from_json(const nlohmann::json& j) {
    const auto r = j.at("rows").get<Eigen::Index>();
    const auto c = j.at("cols").get<Eigen::Index>();
    auto data = j.at("data").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(data.size()) != r * c) throw DataError("matrix payload size mismatch");
    Matrix m(r, c);
    std::copy(data.begin(), data.end(), m.data());
    return m;
}

nlohmann::json model_to_json(const TrainedModel& m) {
    nlohmann::json j;
    j["spec"] = spec_to_json(m.spec());
    j["state"] = m.impl().state_to_json();
    return j;
}

TrainedModel model_from_json(const nlohmann::json& j) {
    try {
        auto spec = spec_from_json(j.at("spec"));
        const auto& s = j.at("state");
        std::shared_ptr<const ModelImpl> impl;
        switch (spec.kind) {
            case ClassifierKind::DecisionTree: impl = TreeModel::from_json(s); break;
            case ClassifierKind::Knn: impl = KnnModel::from_json(s); break;
            case ClassifierKind::Elm: impl = ElmModel::from_json(s); break;
            case ClassifierKind::GaussianNb: impl = NbModel::from_json(s); break;
        }
        return TrainedModel(spec, std::move(impl));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed model file: ") + e.what());
    }
}

void save_model(const TrainedModel& m, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot write " + path);
    os << model_to_json(m).dump() << '\n';
}

TrainedModel load_model(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("cannot parse model " + path + ": " + e.what());
    }
    return model_from_json(j);
}

}  // namespace prach
