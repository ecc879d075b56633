#include "prach/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace prach {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, std::string_view where, std::initializer_list<std::string_view> keys) {
    if (!j.is_object()) throw ConfigError(std::string(where) + " must be an object");
    for (const auto& [k, v] : j.items()) {
        bool known = false;
        for (auto key : keys) known = known || k == key;
        if (!known) throw ConfigError("unknown key '" + k + "' in " + std::string(where));
    }
}

template <class T>
void read(const json& j, std::string_view key, T& out) {
    auto it = j.find(std::string(key));
    if (it == j.end()) return;
    try {
        if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>) {
            if (!it->is_number_unsigned()) throw ConfigError("'" + std::string(key) + "' must be a nonnegative integer");
        } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
            if (!it->is_number_integer()) throw ConfigError("'" + std::string(key) + "' must be an integer");
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!it->is_number()) throw ConfigError("'" + std::string(key) + "' must be a number");
        }
        out = it->get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("bad value for '" + std::string(key) + "': " + e.what());
    }
}

std::string read_string(const json& j, std::string_view key, std::string fallback) {
    auto it = j.find(std::string(key));
    if (it == j.end()) return fallback;
    if (!it->is_string()) throw ConfigError("'" + std::string(key) + "' must be a string");
    return it->get<std::string>();
}

}  // namespace

nlohmann::json gen_config_to_json(const GenConfig& g) {
    return json{{"n_records", g.n_records},
                {"peak_fraction", g.peak_fraction},
                {"snr_db", g.snr_db},
                {"ncs", g.ncs},
                {"n_sequences", g.n_sequences},
                {"seed", g.seed},
                {"zc_length", g.zc_length},
                {"n_sessions", g.n_sessions},
                {"session_floor_span_db", g.session_floor_span_db},
                {"session_snr_span_db", g.session_snr_span_db},
                {"jitter_db", g.jitter_db},
                {"threshold_scale", g.threshold_scale}};
}

GenConfig gen_config_from_json(const nlohmann::json& j) {
    reject_unknown(j, "gen",
                   {"n_records", "peak_fraction", "snr_db", "ncs", "n_sequences", "seed", "zc_length", "n_sessions",
                    "session_floor_span_db", "session_snr_span_db", "jitter_db", "threshold_scale"});
    GenConfig g;
    read(j, "n_records", g.n_records);
    read(j, "peak_fraction", g.peak_fraction);
    read(j, "snr_db", g.snr_db);
    read(j, "ncs", g.ncs);
    read(j, "n_sequences", g.n_sequences);
    read(j, "seed", g.seed);
    read(j, "zc_length", g.zc_length);
    read(j, "n_sessions", g.n_sessions);
    read(j, "session_floor_span_db", g.session_floor_span_db);
    read(j, "session_snr_span_db", g.session_snr_span_db);
    read(j, "jitter_db", g.jitter_db);
    read(j, "threshold_scale", g.threshold_scale);
    return g;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["gen"] = gen_config_to_json(cfg.gen);
    j["noise_levels"] = cfg.noise_levels;
    j["noise_mode"] = std::string(to_string(cfg.noise_mode));
    auto& kinds = j["classifiers"] = json::array();
    for (auto k : cfg.classifiers) kinds.push_back(std::string(to_string(k)));
    auto& spaces = j["feature_spaces"] = json::array();
    for (auto s : cfg.feature_spaces) spaces.push_back(std::string(to_string(s)));
    j["sampling"] = {{"initial_fraction", cfg.sampling.initial_fraction},
                     {"j", cfg.sampling.j},
                     {"k_density", cfg.sampling.k_density},
                     {"seed", cfg.sampling.seed},
                     {"uncertainty", std::string(to_string(cfg.sampling.uncertainty))}};
    j["psr"] = {{"embed_dim", cfg.psr.embed_dim}, {"time_lag", cfg.psr.time_lag}};
    j["pca_k"] = cfg.pca_k;
    j["repeats"] = cfg.repeats;
    j["split"] = cfg.split;
    j["master_seed"] = cfg.master_seed;
    j["tune_folds"] = cfg.tune_folds;
    j["fusion"] = cfg.fusion;
    auto& grids = j["grids"] = json::object();
    for (const auto& [kind, grid] : cfg.grids) {
        auto& arr = grids[std::string(to_string(kind))] = json::array();
        for (const auto& s : grid) arr.push_back(spec_to_json(s));
    }
    return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
    reject_unknown(j, "config",
                   {"gen", "noise_levels", "noise_mode", "classifiers", "feature_spaces", "sampling", "psr", "pca_k",
                    "repeats", "split", "master_seed", "tune_folds", "fusion", "grids"});
    ExperimentConfig cfg;
    try {
        if (j.contains("gen")) cfg.gen = gen_config_from_json(j.at("gen"));
        if (j.contains("noise_levels")) {
            cfg.noise_levels.clear();
            for (const auto& v : j.at("noise_levels")) {
                if (!v.is_number()) throw ConfigError("noise_levels must hold numbers");
                cfg.noise_levels.push_back(v.get<double>());
            }
        }
        cfg.noise_mode = parse_noise_mode(read_string(j, "noise_mode", std::string(to_string(cfg.noise_mode))));
        if (j.contains("classifiers")) {
            cfg.classifiers.clear();
            for (const auto& v : j.at("classifiers")) cfg.classifiers.push_back(parse_classifier_kind(v.get<std::string>()));
        }
        if (j.contains("feature_spaces")) {
            cfg.feature_spaces.clear();
            for (const auto& v : j.at("feature_spaces")) cfg.feature_spaces.push_back(parse_space(v.get<std::string>()));
        }
        if (j.contains("sampling")) {
            const auto& s = j.at("sampling");
            reject_unknown(s, "sampling", {"initial_fraction", "j", "k_density", "seed", "uncertainty"});
            read(s, "initial_fraction", cfg.sampling.initial_fraction);
            read(s, "j", cfg.sampling.j);
            read(s, "k_density", cfg.sampling.k_density);
            read(s, "seed", cfg.sampling.seed);
            cfg.sampling.uncertainty =
                parse_uncertainty_mode(read_string(s, "uncertainty", std::string(to_string(cfg.sampling.uncertainty))));
        }
        if (j.contains("psr")) {
            const auto& p = j.at("psr");
            reject_unknown(p, "psr", {"embed_dim", "time_lag"});
            read(p, "embed_dim", cfg.psr.embed_dim);
            read(p, "time_lag", cfg.psr.time_lag);
        }
        read(j, "pca_k", cfg.pca_k);
        read(j, "repeats", cfg.repeats);
        read(j, "split", cfg.split);
        read(j, "master_seed", cfg.master_seed);
        read(j, "tune_folds", cfg.tune_folds);
        read(j, "fusion", cfg.fusion);
        if (j.contains("grids")) {
            if (!j.at("grids").is_object()) throw ConfigError("grids must be an object keyed by classifier");
            for (const auto& [k, arr] : j.at("grids").items()) {
                const auto kind = parse_classifier_kind(k);
                std::vector<ClassifierSpec> grid;
                for (const auto& s : arr) grid.push_back(spec_from_json(s));
                cfg.grids[kind] = std::move(grid);
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

void apply_override(nlohmann::json& doc, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0) throw ConfigError("override must look like key.path=value: " + std::string(assignment));
    const std::string path(assignment.substr(0, eq));
    const std::string text(assignment.substr(eq + 1));
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;

    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (key.empty()) throw ConfigError("empty key in override path " + path);
        if (!node->is_object()) {
            if (!node->is_null()) throw ConfigError("override path " + path + " descends into a non-object");
            *node = json::object();
        }
        node = &(*node)[key];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    *node = std::move(value);
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    json j = json::parse(buf.str(), nullptr, false);
    if (j.is_discarded()) throw ConfigError("cannot parse " + path.string() + " as JSON");
    return j;
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
    json doc = path.empty() ? json::object() : read_json_file(path);
    for (const auto& o : overrides) apply_override(doc, o);
    return config_from_json(doc);
}

}  // namespace prach
