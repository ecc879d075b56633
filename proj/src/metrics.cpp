#include "prach/metrics.hpp"

#include <cmath>

namespace prach {

Confusion confusion(std::span<const Label> truth, std::span<const Label> pred) {
    if (truth.size() != pred.size())
        throw DimensionMismatch("label vectors differ in length: " + std::to_string(truth.size()) + " vs " +
                                std::to_string(pred.size()));
    if (truth.empty()) throw DataError("metrics need at least one label");
    Confusion c;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool t = truth[i] == Label::Peak;
        const bool p = pred[i] == Label::Peak;
        if (t && p) ++c.tp;
        else if (!t && p) ++c.fp;
        else if (t && !p) ++c.fn;
        else ++c.tn;
    }
    return c;
}

double f1_score(const Confusion& c) {
    const double denom = 2.0 * static_cast<double>(c.tp) + static_cast<double>(c.fp) + static_cast<double>(c.fn);
    return c.tp == 0 ? 0.0 : 2.0 * static_cast<double>(c.tp) / denom;
}

double f1_score(std::span<const Label> truth, std::span<const Label> pred) {
    return f1_score(confusion(truth, pred));
}

double accuracy(std::span<const Label> truth, std::span<const Label> pred) {
    const auto c = confusion(truth, pred);
    return static_cast<double>(c.tp + c.tn) / static_cast<double>(truth.size());
}

MeanStd mean_std(std::span<const double> values) {
    MeanStd r;
    if (values.empty()) return r;
    double s = 0.0;
    for (double v : values) s += v;
    r.mean = s / static_cast<double>(values.size());
    if (values.size() > 1) {
        double q = 0.0;
        for (double v : values) q += (v - r.mean) * (v - r.mean);
        r.std = std::sqrt(q / static_cast<double>(values.size() - 1));
    }
    return r;
}

}  // namespace prach
