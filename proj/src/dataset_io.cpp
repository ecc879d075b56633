#include "prach/dataset_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace prach {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

namespace {

double parse_double(std::string_view s, std::size_t line) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw DataError("line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
    if (!std::isfinite(v))
        throw DataError("line " + std::to_string(line) + ": non-finite value");
    return v;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

}  // namespace

void write_dataset_csv(const Dataset& ds, std::ostream& os) {
    os << "amplitude,variance,threshold,snr,label\n";
    for (const auto& r : ds.records())
        os << format_double(r.amplitude) << ',' << format_double(r.variance) << ','
           << format_double(r.threshold) << ',' << format_double(r.snr) << ',' << to_string(r.label)
           << '\n';
}

std::vector<FeatureRecord> read_records_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw DataError("empty dataset file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "amplitude,variance,threshold,snr,label")
        throw DataError("unexpected dataset header '" + line + "'");
    std::vector<FeatureRecord> out;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto f = split_fields(line);
        if (f.size() != 5)
            throw DataError("line " + std::to_string(lineno) + ": expected 5 fields");
        FeatureRecord r;
        for (int j = 0; j < kNumFeatures; ++j) r.feature(j) = parse_double(f[static_cast<std::size_t>(j)], lineno);
        r.label = parse_label(f[4]);
        out.push_back(r);
    }
    return out;
}

nlohmann::json provenance_to_json(const Provenance& p) {
    nlohmann::json j;
    j["gen_seed"] = p.gen_seed ? nlohmann::json(*p.gen_seed) : nlohmann::json(nullptr);
    j["mean_normalized"] = p.mean_normalized;
    j["noise"] = nlohmann::json::array();
    for (const auto& n : p.noise)
        j["noise"].push_back({{"mode", std::string(to_string(n.mode))},
                              {"fraction", n.fraction},
                              {"seed", n.seed},
                              {"sigma", n.sigma},
                              {"corrupted", n.corrupted}});
    return j;
}

Provenance provenance_from_json(const nlohmann::json& j) {
    try {
        Provenance p;
        if (j.contains("gen_seed") && !j["gen_seed"].is_null())
            p.gen_seed = j["gen_seed"].get<std::uint64_t>();
        p.mean_normalized = j.value("mean_normalized", false);
        if (j.contains("noise"))
            for (const auto& n : j["noise"]) {
                NoiseProvenance np;
                np.mode = parse_noise_mode(n.at("mode").get<std::string>());
                np.fraction = n.at("fraction").get<double>();
                np.seed = n.at("seed").get<std::uint64_t>();
                np.sigma = n.value("sigma", 0.0);
                np.corrupted = n.value("corrupted", std::size_t{0});
                p.noise.push_back(np);
            }
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed dataset metadata: ") + e.what());
    }
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
    auto p = csv;
    p += ".meta.json";
    return p;
}

void save_dataset(const Dataset& ds, const std::filesystem::path& csv) {
    std::ofstream os(csv);
    if (!os) throw IoError("cannot write " + csv.string());
    write_dataset_csv(ds, os);
    std::ofstream meta(sidecar_path(csv));
    if (!meta) throw IoError("cannot write " + sidecar_path(csv).string());
    meta << provenance_to_json(ds.provenance()).dump(2) << '\n';
    if (!os || !meta) throw IoError("write failed for " + csv.string());
}

Dataset load_dataset(const std::filesystem::path& csv) {
    std::ifstream is(csv);
    if (!is) throw IoError("cannot open " + csv.string());
    auto records = read_records_csv(is);
    Provenance prov;
    const auto side = sidecar_path(csv);
    if (std::filesystem::exists(side)) {
        std::ifstream ms(side);
        nlohmann::json j;
        try {
            ms >> j;
        } catch (const nlohmann::json::exception& e) {
            throw DataError("cannot parse " + side.string() + ": " + e.what());
        }
        prov = provenance_from_json(j);
    }
    return Dataset(std::move(records), std::move(prov));
}

}  // namespace prach
