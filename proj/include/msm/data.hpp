#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "msm/series.hpp"

namespace msm {

struct PriceSeries {
    std::vector<std::string> dates; // empty, or one ISO-8601 date per value
    std::vector<double> values;
    std::string label;
};

// Throws ValidationError unless values are finite, length >= 3 and dates
// (when present) match the values in length and increase strictly.
void validate(const PriceSeries& p);

struct CsvSpec {
    char delimiter = ',';
    bool has_header = true;
    int value_column = -1;  // -1: value_name if set, otherwise the last column
    std::string value_name; // resolved against the header
    int date_column = -1;   // -1: auto-detect an ISO date in column 0; -2: none
    std::string date_name;
};

struct LoadResult {
    PriceSeries series;
    std::size_t skipped_rows = 0; // blank rows and rows without a numeric value
};

LoadResult load_csv(const std::string& path, const CsvSpec& spec = {});

// log_diff: ln p_t - ln p_{t-1} (prices must be positive); diff: p_t - p_{t-1}.
ReturnSeries to_returns(const PriceSeries& p, Transform transform);

// Divide by the population standard deviation and set the standardized flag.
// The mean is left untouched.
ReturnSeries standardize(const ReturnSeries& r);

} // namespace msm
