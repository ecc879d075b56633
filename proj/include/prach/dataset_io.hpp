#pragma once

#include "prach/core.hpp"

#include <filesystem>
#include <iosfwd>

#include <json.hpp>

namespace prach {

// CSV with header amplitude,variance,threshold,snr,label; 17 significant digits.
void write_dataset_csv(const Dataset& ds, std::ostream& os);
std::vector<FeatureRecord> read_records_csv(std::istream& is);

nlohmann::json provenance_to_json(const Provenance& p);
Provenance provenance_from_json(const nlohmann::json& j);

// Sidecar metadata lives next to the CSV as <file>.meta.json.
std::filesystem::path sidecar_path(const std::filesystem::path& csv);
void save_dataset(const Dataset& ds, const std::filesystem::path& csv);
// A missing sidecar yields empty provenance.
Dataset load_dataset(const std::filesystem::path& csv);

std::string format_double(double v);

}  // namespace prach
