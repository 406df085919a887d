#include "msm/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "json.hpp"

#include "msm/errors.hpp"

namespace msm {

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= static_cast<std::uint64_t>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

namespace {

std::string format_with(const char* fmt, double v) {
    if (v == 0.0) v = 0.0; // collapse -0
    char buf[40];
    std::snprintf(buf, sizeof(buf), fmt, v);
    return buf;
}

} // namespace

std::string format_number(double v) { return format_with("%.10g", v); }

std::string format_number_exact(double v) { return format_with("%.17g", v); }

namespace {

void check_table(const Table& t) {
    if (t.name.empty()) throw ValidationError("table name must be non-empty");
    if (t.columns.empty()) throw ValidationError("table '" + t.name + "' has no columns");
    for (const auto& row : t.rows) {
        if (row.size() != t.columns.size())
            throw ValidationError("table '" + t.name + "' row width does not match header");
    }
}

} // namespace

void write_csv(std::ostream& os, const std::vector<Table>& tables, const TableMeta& meta) {
    os << "# version=" << meta.version << "\n";
    os << "# seed=" << meta.seed << "\n";
    os << "# config=" << meta.config_hash << "\n";
    for (const auto& [key, value] : meta.extra) os << "# " << key << "=" << value << "\n";
    for (const auto& t : tables) {
        check_table(t);
        os << "# table=" << t.name << "\n";
        for (std::size_t c = 0; c < t.columns.size(); ++c) {
            if (c) os << ',';
            os << t.columns[c];
        }
        os << "\n";
        for (const auto& row : t.rows) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                if (c) os << ',';
                os << row[c];
            }
            os << "\n";
        }
        os << "\n";
    }
}

void write_json(std::ostream& os, const std::vector<Table>& tables, const TableMeta& meta) {
    nlohmann::ordered_json root;
    root["meta"]["version"] = meta.version;
    root["meta"]["seed"] = meta.seed;
    root["meta"]["config_hash"] = meta.config_hash;
    for (const auto& [key, value] : meta.extra) root["meta"][key] = value;
    root["tables"] = nlohmann::ordered_json::object();
    for (const auto& t : tables) {
        check_table(t);
        nlohmann::ordered_json jt;
        jt["columns"] = t.columns;
        jt["rows"] = t.rows;
        root["tables"][t.name] = std::move(jt);
    }
    os << root.dump(2) << "\n";
}

} // namespace msm
