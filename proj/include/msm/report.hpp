#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace msm {

std::uint64_t fnv1a64(const std::string& s);
std::string hex64(std::uint64_t v);

// Compact fixed formatting shared by CSV and JSON output so identical runs
// emit identical bytes.
std::string format_number(double v);
// Lossless formatting for raw series that feed back into estimation.
std::string format_number_exact(double v);

struct TableMeta {
    std::string version;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::vector<std::pair<std::string, std::string>> extra; // e.g. excluded counts
};

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

// Comment-line metadata header, then one block per table:
// "# table=<name>", a column header row, data rows, blank separator.
void write_csv(std::ostream& os, const std::vector<Table>& tables, const TableMeta& meta);

// {"meta": {...}, "tables": {name: {"columns": [...], "rows": [[...]]}}}
// with insertion order preserved. Cells stay strings, formatted as in CSV.
void write_json(std::ostream& os, const std::vector<Table>& tables, const TableMeta& meta);

} // namespace msm
