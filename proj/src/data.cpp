#include "msm/data.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>

#include "msm/errors.hpp"

namespace msm {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(delim, start);
        if (pos == std::string::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

std::optional<double> parse_number(const std::string& cell) {
    if (cell.empty()) return std::nullopt;
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end != cell.c_str() + cell.size()) return std::nullopt;
    if (!std::isfinite(v)) return std::nullopt;
    return v;
}

bool is_iso_date(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

int resolve_column(const std::vector<std::string>& header, const std::string& name,
                   const std::string& path) {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    throw IoError(path + ": no column named '" + name + "'");
}

} // namespace

void validate(const PriceSeries& p) {
    if (p.values.size() < 3) throw ValidationError("price series needs at least 3 observations");
    for (double v : p.values)
        if (!std::isfinite(v)) throw ValidationError("price series contains non-finite values");
    if (!p.dates.empty()) {
        if (p.dates.size() != p.values.size())
            throw ValidationError("dates and values differ in length");
        for (std::size_t i = 1; i < p.dates.size(); ++i)
            if (!(p.dates[i - 1] < p.dates[i]))
                throw ValidationError("dates must be strictly increasing");
    }
}

LoadResult load_csv(const std::string& path, const CsvSpec& spec) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);

    LoadResult out;
    out.series.label = std::filesystem::path(path).stem().string();

    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    int value_col = spec.value_column;
    int date_col = spec.date_column;
    bool columns_resolved = false;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        // '#' lines are comments (our own writers emit metadata this way), not data
        const std::string trimmed = trim(line);
        if (!trimmed.empty() && trimmed[0] == '#') continue;
        if (header.empty() && spec.has_header) {
            if (trim(line).empty()) continue;
            header = split(line, spec.delimiter);
            if (!spec.value_name.empty()) value_col = resolve_column(header, spec.value_name, path);
            if (!spec.date_name.empty()) date_col = resolve_column(header, spec.date_name, path);
            continue;
        }
        if (trimmed.empty()) continue;
        const std::vector<std::string> cells = split(line, spec.delimiter);
        if (!columns_resolved) {
            if (value_col < 0) value_col = static_cast<int>(cells.size()) - 1;
            if (date_col == -1) {
                const bool detected = cells.size() >= 2 && value_col != 0 && is_iso_date(cells[0]);
                date_col = detected ? 0 : -2;
            }
            if (date_col >= 0 && date_col == value_col)
                throw ValidationError("date and value columns coincide");
            columns_resolved = true;
        }
        if (static_cast<std::size_t>(value_col) >= cells.size()) {
            ++out.skipped_rows;
            continue;
        }
        const std::optional<double> v = parse_number(cells[static_cast<std::size_t>(value_col)]);
        if (!v) {
            ++out.skipped_rows;
            continue;
        }
        if (date_col >= 0) {
            if (static_cast<std::size_t>(date_col) >= cells.size() ||
                !is_iso_date(cells[static_cast<std::size_t>(date_col)]))
                throw IoError(path + " line " + std::to_string(line_no) + ": malformed date");
            const std::string& d = cells[static_cast<std::size_t>(date_col)];
            if (!out.series.dates.empty() && !(out.series.dates.back() < d))
                throw IoError(path + " line " + std::to_string(line_no) +
                              ": dates not strictly increasing");
            out.series.dates.push_back(d);
        }
        out.series.values.push_back(*v);
    }
    if (in.bad()) throw IoError("read failure on " + path);
    if (out.series.values.empty()) throw IoError(path + ": no usable data rows");
    if (out.series.values.size() < 3) throw IoError(path + ": fewer than 3 usable rows");
    validate(out.series);
    return out;
}

ReturnSeries to_returns(const PriceSeries& p, Transform transform) {
    if (transform == Transform::raw) throw ValidationError("transform must be log_diff or diff");
    if (p.values.size() < 2) throw ValidationError("need at least 2 prices");
    for (double v : p.values)
        if (!std::isfinite(v)) throw ValidationError("price series contains non-finite values");
    ReturnSeries out;
    out.transform = transform;
    out.label = p.label;
    out.values.reserve(p.values.size() - 1);
    if (transform == Transform::log_diff) {
        for (double v : p.values)
            if (!(v > 0.0)) throw ValidationError("log_diff requires strictly positive prices");
        for (std::size_t i = 1; i < p.values.size(); ++i)
            out.values.push_back(std::log(p.values[i]) - std::log(p.values[i - 1]));
    } else {
        for (std::size_t i = 1; i < p.values.size(); ++i)
            out.values.push_back(p.values[i] - p.values[i - 1]);
    }
    return out;
}

ReturnSeries standardize(const ReturnSeries& r) {
    validate(r);
    const double s = population_std(r.values);
    double rms = 0.0;
    for (double v : r.values) rms += v * v;
    rms = std::sqrt(rms / static_cast<double>(r.values.size()));
    // relative threshold: an exactly constant series accumulates rounding
    // dust of order 1e-16 * level instead of a clean zero
    if (!(s > 1e-12 * rms)) throw NumericalError("cannot standardize a zero-variance series");
    ReturnSeries out = r;
    for (double& v : out.values) v /= s;
    out.standardized = true;
    return out;
}

} // namespace msm
