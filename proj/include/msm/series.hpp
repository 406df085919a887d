#pragma once

#include <string>
#include <vector>

namespace msm {

// How a return series was obtained from the underlying level series.
enum class Transform { log_diff, diff, raw };

const char* to_string(Transform t);

struct ReturnSeries {
    std::vector<double> values;
    Transform transform = Transform::raw;
    bool standardized = false;
    std::string label;
};

// Population standard deviation (divisor n).
double population_std(const std::vector<double>& x);

// Throws ValidationError unless the series has >= 2 finite values and, when
// flagged standardized, a population std within 1e-9 of 1.
void validate(const ReturnSeries& r);

} // namespace msm
