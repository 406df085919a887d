#include "msm/series.hpp"

#include <cmath>

#include "msm/errors.hpp"

namespace msm {

const char* to_string(Transform t) {
    switch (t) {
        case Transform::log_diff: return "log_diff";
        case Transform::diff: return "diff";
        default: return "raw";
    }
}

double population_std(const std::vector<double>& x) {
    if (x.empty()) return 0.0;
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(x.size()));
}

void validate(const ReturnSeries& r) {
    if (r.values.size() < 2) throw ValidationError("return series needs at least 2 observations");
    for (double v : r.values)
        if (!std::isfinite(v)) throw ValidationError("return series contains non-finite values");
    if (r.standardized) {
        const double s = population_std(r.values);
        if (std::abs(s - 1.0) > 1e-9) throw ValidationError("series flagged standardized but std != 1");
    }
}

} // namespace msm
