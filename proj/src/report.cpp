#include "prach/report.hpp"

#include "prach/config.hpp"
#include "prach/dataset_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace prach {

namespace {

using nlohmann::json;

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double num_from(const json& j) { return j.is_null() ? std::nan("") : j.get<double>(); }

json runs_json(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}
std::vector<double> runs_from(const json& j) {
    std::vector<double> v;
    for (const auto& x : j) v.push_back(num_from(x));
    return v;
}

json ms_json(const MeanStd& m) { return {{"mean", num(m.mean)}, {"std", num(m.std)}}; }
MeanStd ms_from(const json& j) { return {num_from(j.at("mean")), num_from(j.at("std"))}; }

std::string csv_num(double v) { return std::isfinite(v) ? format_double(v) : "nan"; }

std::string fixed4(double v) {
    if (!std::isfinite(v)) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::string percent(double level) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g%%", level * 100.0);
    return buf;
}

FusionMode parse_fusion_mode(std::string_view s) {
    if (s == to_string(FusionMode::WeightedAverage)) return FusionMode::WeightedAverage;
    if (s == to_string(FusionMode::MetaNb)) return FusionMode::MetaNb;
    throw DataError("unknown fusion mode: " + std::string(s));
}

}  // namespace

nlohmann::json report_to_json(const ExperimentReport& rep) {
    json j;
    j["config"] = config_to_json(rep.config);
    auto& cells = j["cells"] = json::array();
    for (const auto& c : rep.cells) {
        cells.push_back({{"space", std::string(to_string(c.space))},
                         {"classifier", std::string(to_string(c.kind))},
                         {"noise", c.noise},
                         {"f1", ms_json(c.f1)},
                         {"acc", ms_json(c.acc)},
                         {"base_f1", ms_json(c.base_f1)},
                         {"base_acc", ms_json(c.base_acc)},
                         {"f1_runs", runs_json(c.f1_runs)},
                         {"base_f1_runs", runs_json(c.base_f1_runs)},
                         {"specs", c.specs},
                         {"base_specs", c.base_specs},
                         {"seeds", c.seeds},
                         {"errors", c.errors}});
    }
    auto& fusion = j["fusion"] = json::array();
    for (const auto& f : rep.fusion) {
        fusion.push_back({{"mode", std::string(to_string(f.mode))},
                          {"noise", f.noise},
                          {"f1", ms_json(f.f1)},
                          {"acc", ms_json(f.acc)},
                          {"f1_runs", runs_json(f.f1_runs)},
                          {"streams", f.streams},
                          {"errors", f.errors}});
    }
    j["seeds"] = rep.seeds;
    return j;
}

ExperimentReport report_from_json(const nlohmann::json& j) {
    ExperimentReport rep;
    try {
        rep.config = config_from_json(j.at("config"));
        for (const auto& c : j.at("cells")) {
            CellSummary s;
            s.space = parse_space(c.at("space").get<std::string>());
            s.kind = parse_classifier_kind(c.at("classifier").get<std::string>());
            s.noise = c.at("noise").get<double>();
            s.f1 = ms_from(c.at("f1"));
            s.acc = ms_from(c.at("acc"));
            s.base_f1 = ms_from(c.at("base_f1"));
            s.base_acc = ms_from(c.at("base_acc"));
            s.f1_runs = runs_from(c.at("f1_runs"));
            s.base_f1_runs = runs_from(c.at("base_f1_runs"));
            s.specs = c.at("specs").get<std::vector<std::string>>();
            s.base_specs = c.at("base_specs").get<std::vector<std::string>>();
            s.seeds = c.at("seeds").get<std::vector<std::uint64_t>>();
            s.errors = c.at("errors").get<std::vector<std::string>>();
            rep.cells.push_back(std::move(s));
        }
        for (const auto& f : j.at("fusion")) {
            FusionSummary s;
            s.mode = parse_fusion_mode(f.at("mode").get<std::string>());
            s.noise = f.at("noise").get<double>();
            s.f1 = ms_from(f.at("f1"));
            s.acc = ms_from(f.at("acc"));
            s.f1_runs = runs_from(f.at("f1_runs"));
            s.streams = f.at("streams").get<std::vector<std::string>>();
            s.errors = f.at("errors").get<std::vector<std::string>>();
            rep.fusion.push_back(std::move(s));
        }
        rep.seeds = j.at("seeds").get<std::map<std::string, std::uint64_t>>();
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed report: ") + e.what());
    }
    return rep;
}

std::string cells_csv(const ExperimentReport& rep) {
    std::ostringstream out;
    out << "space,classifier,noise,repeats,f1_mean,f1_std,acc_mean,acc_std,base_f1_mean,base_f1_std,base_acc_mean,"
           "base_acc_std,failures\n";
    for (const auto& c : rep.cells)
        out << to_string(c.space) << ',' << to_string(c.kind) << ',' << format_double(c.noise) << ','
            << c.f1_runs.size() << ',' << csv_num(c.f1.mean) << ',' << csv_num(c.f1.std) << ',' << csv_num(c.acc.mean)
            << ',' << csv_num(c.acc.std) << ',' << csv_num(c.base_f1.mean) << ',' << csv_num(c.base_f1.std) << ','
            << csv_num(c.base_acc.mean) << ',' << csv_num(c.base_acc.std) << ',' << c.errors.size() << '\n';
    return out.str();
}

std::string fusion_csv(const ExperimentReport& rep) {
    std::ostringstream out;
    out << "mode,noise,repeats,f1_mean,f1_std,acc_mean,acc_std,failures\n";
    for (const auto& f : rep.fusion)
        out << to_string(f.mode) << ',' << format_double(f.noise) << ',' << f.f1_runs.size() << ','
            << csv_num(f.f1.mean) << ',' << csv_num(f.f1.std) << ',' << csv_num(f.acc.mean) << ','
            << csv_num(f.acc.std) << ',' << f.errors.size() << '\n';
    return out.str();
}

std::string report_markdown(const ExperimentReport& rep) {
    const auto& levels = rep.config.noise_levels;
    std::ostringstream out;
    out << "# F1 by classifier and noise level\n\n";
    out << "Mean test F1 over " << rep.config.repeats << " repeats (std in parentheses). "
        << "\"self-trained\" rows start from " << percent(rep.config.sampling.initial_fraction)
        << " labeled data with J = " << rep.config.sampling.j << "; \"baseline\" rows use every training label.\n\n";
    out << "| Space | Classifier | Strategy |";
    for (double l : levels) out << ' ' << percent(l) << " |";
    out << "\n|---|---|---|";
    for (std::size_t i = 0; i < levels.size(); ++i) out << "---|";
    out << '\n';

    auto find_cell = [&](SpaceTag s, ClassifierKind k, double l) -> const CellSummary* {
        for (const auto& c : rep.cells)
            if (c.space == s && c.kind == k && noise_key(c.noise) == noise_key(l)) return &c;
        return nullptr;
    };
    for (auto space : rep.config.feature_spaces)
        for (auto kind : rep.config.classifiers)
            for (int base = 0; base < 2; ++base) {
                out << "| " << to_string(space) << " | " << to_string(kind) << " | "
                    << (base ? "baseline" : "self-trained") << " |";
                for (double l : levels) {
                    const CellSummary* c = find_cell(space, kind, l);
                    if (!c) {
                        out << " - |";
                        continue;
                    }
                    const MeanStd& m = base ? c->base_f1 : c->f1;
                    out << ' ' << fixed4(m.mean) << " (" << fixed4(m.std) << ") |";
                }
                out << '\n';
            }
    for (auto mode : {FusionMode::WeightedAverage, FusionMode::MetaNb}) {
        bool any = false;
        for (const auto& f : rep.fusion) any = any || f.mode == mode;
        if (!any) continue;
        out << "| Fusion | " << to_string(mode) << " | self-trained |";
        for (double l : levels) {
            const FusionSummary* row = nullptr;
            for (const auto& f : rep.fusion)
                if (f.mode == mode && noise_key(f.noise) == noise_key(l)) row = &f;
            if (row)
                out << ' ' << fixed4(row->f1.mean) << " (" << fixed4(row->f1.std) << ") |";
            else
                out << " - |";
        }
        out << '\n';
    }

    std::size_t failures = 0;
    for (const auto& c : rep.cells) failures += c.errors.size();
    for (const auto& f : rep.fusion) failures += f.errors.size();
    if (failures > 0) {
        out << "\n## Failed runs\n\n";
        for (const auto& c : rep.cells)
            for (const auto& e : c.errors)
                out << "- " << to_string(c.space) << '/' << to_string(c.kind) << " at " << percent(c.noise) << ": " << e
                    << '\n';
        for (const auto& f : rep.fusion)
            for (const auto& e : f.errors) out << "- fusion " << to_string(f.mode) << " at " << percent(f.noise) << ": " << e << '\n';
    }
    return out.str();
}

std::string j_curve_csv(const std::vector<JPoint>& curve) {
    std::ostringstream out;
    out << "J,mean_f1,std_f1\n";
    for (const auto& p : curve) out << p.j << ',' << csv_num(p.f1.mean) << ',' << csv_num(p.f1.std) << '\n';
    return out.str();
}

nlohmann::json j_curve_to_json(const std::vector<JPoint>& curve) {
    json a = json::array();
    for (const auto& p : curve) a.push_back({{"j", p.j}, {"f1", ms_json(p.f1)}, {"runs", runs_json(p.runs)}});
    return a;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

void write_report(const std::filesystem::path& dir, const ExperimentReport& rep) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    write_json_file(dir / "report.json", report_to_json(rep));
    write_text_file(dir / "cells.csv", cells_csv(rep));
    write_text_file(dir / "fusion.csv", fusion_csv(rep));
    write_text_file(dir / "report.md", report_markdown(rep));
}

}  // namespace prach
