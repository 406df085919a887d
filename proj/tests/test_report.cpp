#include "doctest.h"

#include <sstream>

#include "json.hpp"

#include "msm/errors.hpp"
#include "msm/report.hpp"

using namespace msm;

namespace {

std::vector<Table> sample_tables() {
    Table a;
    a.name = "estimates";
    a.columns = {"k", "m0_hat", "converged"};
    a.rows = {{"5", format_number(1.4871234567), "1"},
              {"10", format_number(1.5), "1"}};
    Table b;
    b.name = "ghe";
    b.columns = {"q", "h"};
    b.rows = {{"1", format_number(0.74812345)}};
    return {a, b};
}

TableMeta sample_meta() {
    TableMeta m;
    m.version = "0.1.0";
    m.seed = 42;
    m.config_hash = hex64(fnv1a64("k_set=5,10\nseed=42\n"));
    m.extra = {{"excluded", "0"}};
    return m;
}

} // namespace

TEST_CASE("fnv1a64 matches the published reference vectors") {
    CHECK(fnv1a64("") == 14695981039346656037ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
    CHECK(fnv1a64("k=5") != fnv1a64("k=6"));
}

TEST_CASE("hex64 is zero padded and lowercase") {
    CHECK(hex64(0) == "0000000000000000");
    CHECK(hex64(0xaf63dc4c8601ec8cULL) == "af63dc4c8601ec8c");
    CHECK(hex64(1) == "0000000000000001");
}

TEST_CASE("number formatting is stable and normalizes negative zero") {
    CHECK(format_number(1.5) == "1.5");
    CHECK(format_number(-0.0) == "0");
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(123456789012.0) == "1.23456789e+11");
    // exact form must round-trip the double bit for bit
    const double v = 0.437298572934857291;
    CHECK(std::stod(format_number_exact(v)) == v);
    const double tiny = 2.2250738585072014e-308;
    CHECK(std::stod(format_number_exact(tiny)) == tiny);
}

TEST_CASE("csv output carries metadata lines and one block per table") {
    std::ostringstream os;
    write_csv(os, sample_tables(), sample_meta());
    const std::string text = os.str();

    CHECK(text.find("# version=0.1.0\n") != std::string::npos);
    CHECK(text.find("# seed=42\n") != std::string::npos);
    CHECK(text.find("# config=") != std::string::npos);
    CHECK(text.find("# excluded=0\n") != std::string::npos);
    CHECK(text.find("# table=estimates\nk,m0_hat,converged\n") != std::string::npos);
    CHECK(text.find("# table=ghe\nq,h\n") != std::string::npos);
    CHECK(text.find("5,1.487123457,1\n") != std::string::npos);
    // no timestamps or other run-varying content: two writes are identical
    std::ostringstream again;
    write_csv(again, sample_tables(), sample_meta());
    CHECK(text == again.str());
}

TEST_CASE("json output parses back with order and cells preserved") {
    std::ostringstream os;
    write_json(os, sample_tables(), sample_meta());
    const auto root = nlohmann::ordered_json::parse(os.str());

    CHECK(root["meta"]["version"] == "0.1.0");
    CHECK(root["meta"]["seed"] == 42);
    CHECK(root["meta"]["excluded"] == "0");
    REQUIRE(root["tables"].size() == 2);
    auto it = root["tables"].begin();
    CHECK(it.key() == "estimates");
    ++it;
    CHECK(it.key() == "ghe");
    CHECK(root["tables"]["estimates"]["columns"][1] == "m0_hat");
    CHECK(root["tables"]["estimates"]["rows"][0][1] == "1.487123457");

    std::ostringstream again;
    write_json(again, sample_tables(), sample_meta());
    CHECK(os.str() == again.str());
}

TEST_CASE("ragged rows and anonymous tables are rejected") {
    auto tables = sample_tables();
    tables[0].rows.push_back({"only-one-cell"});
    std::ostringstream os;
    CHECK_THROWS_AS(write_csv(os, tables, sample_meta()), ValidationError);

    tables = sample_tables();
    tables[1].name.clear();
    CHECK_THROWS_AS(write_json(os, tables, sample_meta()), ValidationError);
}
