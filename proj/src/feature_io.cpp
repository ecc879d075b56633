#include "prach/feature_io.hpp"

#include "prach/dataset_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace prach {

std::vector<std::string> feature_column_names(SpaceTag space, std::size_t cols) {
    std::vector<std::string> names;
    switch (space) {
        case SpaceTag::Raw:
            if (cols != kNumFeatures) throw DimensionMismatch("raw space has 4 columns");
            for (auto n : kFeatureNames) names.emplace_back(n);
            break;
        case SpaceTag::Psr: {
            if (cols % kNumFeatures != 0) throw DimensionMismatch("PSR width must be a multiple of 4");
            const auto m = cols / kNumFeatures;
            for (auto n : kFeatureNames)
                for (std::size_t d = 0; d < m; ++d) names.push_back(std::string(n) + "_lag" + std::to_string(d));
            break;
        }
        case SpaceTag::Pca:
            for (std::size_t c = 0; c < cols; ++c) names.push_back("pc" + std::to_string(c + 1));
            break;
    }
    return names;
}

void write_feature_csv(const FeatureMatrix& m, std::ostream& os) {
    for (const auto& n : feature_column_names(m.space, m.cols())) os << n << ',';
    os << "label\n";
    for (Eigen::Index i = 0; i < m.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.values.cols(); ++j) os << format_double(m.values(i, j)) << ',';
        os << to_string(m.labels[static_cast<std::size_t>(i)]) << '\n';
    }
}

FeatureMatrix read_feature_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw DataError("empty feature file");
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header.push_back(cell);
    }
    if (header.size() < 2 || header.back() != "label") throw DataError("feature header must end with label");
    const std::size_t cols = header.size() - 1;
    SpaceTag space = SpaceTag::Raw;
    if (header[0] == "pc1")
        space = SpaceTag::Pca;
    else if (header[0].find("_lag") != std::string::npos)
        space = SpaceTag::Psr;
    header.pop_back();
    if (header != feature_column_names(space, cols)) throw DataError("unrecognised feature header");

    std::vector<double> vals;
    std::vector<Label> labels;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        for (std::size_t c = 0; c < cols; ++c) {
            if (!std::getline(ss, cell, ','))
                throw DataError("line " + std::to_string(lineno) + ": too few fields");
            double v = 0.0;
            auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
                throw DataError("line " + std::to_string(lineno) + ": bad number");
            vals.push_back(v);
        }
        if (!std::getline(ss, cell)) throw DataError("line " + std::to_string(lineno) + ": missing label");
        labels.push_back(parse_label(cell));
    }
    Matrix m(static_cast<Eigen::Index>(labels.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < labels.size(); ++i)
        for (std::size_t c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = vals[i * cols + c];
    return FeatureMatrix(std::move(m), std::move(labels), space);
}

void save_feature_matrix(const FeatureMatrix& m, const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot write " + path.string());
    write_feature_csv(m, os);
}

FeatureMatrix load_feature_matrix(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path.string());
    return read_feature_csv(is);
}

}  // namespace prach
