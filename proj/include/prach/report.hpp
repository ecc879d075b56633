#pragma once

#include "prach/experiment.hpp"

#include <json.hpp>

#include <filesystem>

namespace prach {

// Full report: config echo, per-cell runs, specs and seeds, fusion rows.
nlohmann::json report_to_json(const ExperimentReport& rep);
ExperimentReport report_from_json(const nlohmann::json& j);

// One row per classifier cell: mean/std of self-trained and baseline F1 and accuracy.
std::string cells_csv(const ExperimentReport& rep);
// One row per (fusion mode, noise level).
std::string fusion_csv(const ExperimentReport& rep);
// Rows are classifier/space pairs (self-trained and baseline) plus fusion
// modes; columns are noise levels. Cells show mean F1.
std::string report_markdown(const ExperimentReport& rep);

std::string j_curve_csv(const std::vector<JPoint>& curve);
nlohmann::json j_curve_to_json(const std::vector<JPoint>& curve);

// report.json, cells.csv, fusion.csv, report.md.
void write_report(const std::filesystem::path& dir, const ExperimentReport& rep);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace prach
