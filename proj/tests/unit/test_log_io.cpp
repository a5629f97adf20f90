#include <fstream>
#include <sstream>

#include "doctest.h"
#include "logsample/errors.hpp"
#include "logsample/log_io.hpp"
#include "test_logs.hpp"

using namespace logsample;

namespace {

const std::string kData = LOGSAMPLE_TEST_DATA;

CsvColumnMapping table1_mapping() {
    CsvColumnMapping m;
    m.case_id_column = "Case-id";
    m.event_id_column = "Event-id";
    m.activity_column = "Activity name";
    m.start_time_column = "Starting time";
    m.complete_time_column = "Finishing time";
    return m;
}

std::string to_csv(const EventLog& log) {
    std::ostringstream out;
    write_log_csv(log, out);
    return out.str();
}

}  // namespace

TEST_CASE("table 1 transcription has cases 7 and 8") {
    const auto log = read_csv(kData + "/table1.csv", table1_mapping());
    REQUIRE(log.case_count() == 2);
    CHECK(log.cases()[0].id() == "7");
    CHECK(log.cases()[1].id() == "8");
    CHECK(log.cases()[0].variant() == Variant{"Register(a)", "Analyze Defect(b)", "Inform User(g)",
                                              "Test Repair(e)", "Archive Repair(h)"});
    CHECK(log.cases()[1].size() == 2);
    CHECK(format_timestamp(log.cases()[1].events()[0].end_time()) == "2021-01-02 13:15:00");
}

TEST_CASE("row order does not matter") {
    const auto a = read_csv(kData + "/table1.csv", table1_mapping());
    const auto b = read_csv(kData + "/table1_shuffled.csv", table1_mapping());
    CHECK(to_csv(a) == to_csv(b));
}

TEST_CASE("header-only file is an empty log") {
    CHECK_THROWS_AS(read_csv(kData + "/header_only.csv"), EmptyLog);
}

TEST_CASE("missing mapped column") {
    std::istringstream in("case,activity,start_time\nc1,a,2021-01-01 10:00\n");
    CHECK_THROWS_AS(read_csv(in), MappingError);
    std::istringstream dup("case_id,activity,start_time\n");
    CsvColumnMapping same;
    same.activity_column = "case_id";
    CHECK_THROWS_AS(read_csv(dup, same), MappingError);
}

TEST_CASE("parse errors report their line") {
    try {
        read_csv(kData + "/bad_row.csv");
        FAIL("expected an error");
    } catch (const MissingMandatoryField& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    try {
        read_csv(kData + "/bad_quote.csv");
        FAIL("expected an error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    std::istringstream bad_time("case_id,activity,start_time\nc1,a,yesterday\n");
    try {
        read_csv(bad_time);
        FAIL("expected an error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    std::istringstream ragged("case_id,activity,start_time\nc1,a\n");
    CHECK_THROWS_AS(read_csv(ragged), ParseError);
}

TEST_CASE("case attributes must agree across rows") {
    std::istringstream in(
        "case_id,activity,start_time,case:x\nc1,a,2021-01-01 10:00,1\nc1,b,2021-01-01 10:05,2\n");
    CHECK_THROWS_AS(read_csv(in), ParseError);
}

TEST_CASE("quoted fields with commas and newlines") {
    std::istringstream in(
        "case_id,activity,start_time,note\n"
        "c1,\"Check, twice\",2021-01-01 10:00,\"line one\nline two\"\n"
        "c1,b,2021-01-01 10:05,\"say \"\"hi\"\"\"\n");
    const auto log = read_csv(in);
    const auto& c = log.cases()[0];
    CHECK(c.variant() == Variant{"Check, twice", "b"});
    CHECK(std::get<std::string>(c.events()[0].attributes.at("note")) == "line one\nline two");
    CHECK(std::get<std::string>(c.events()[1].attributes.at("note")) == "say \"hi\"");
    std::istringstream written(to_csv(log));
    const auto again = read_csv(written);
    CHECK(equivalent(log, again));
}

TEST_CASE("table 2 CSV writes deterministically and round-trips") {
    const auto log = read_csv(kData + "/table2.csv");
    CHECK(log.case_count() == 10);
    CHECK(log.schema().at("Amount") == AttributeSpec{AttributeKind::numeric, AttributeScope::case_level});
    const auto first = to_csv(log);
    CHECK(first == to_csv(read_csv(kData + "/table2.csv")));
    std::istringstream in(first);
    const auto back = read_csv(in);
    CHECK(equivalent(log, back));
    CHECK(to_csv(back) == first);
    CHECK(first.rfind("case_id,event_id,activity,start_time,complete_time,case:Amount\n", 0) == 0);
}

TEST_CASE("writing to an unwritable path fails") {
    const auto log = logsample::testing::table2_log();
    CHECK_THROWS_AS(write_log_csv(log, std::filesystem::path("/nonexistent-dir/x/out.csv")), IoError);
}

TEST_CASE("schema overrides change kind and scope") {
    auto mapping = CsvColumnMapping{};
    mapping.overrides = read_schema_overrides(kData + "/overrides.txt");
    const auto log = read_csv(kData + "/table2.csv", mapping);
    CHECK(log.schema().at("Amount").kind == AttributeKind::categorical);

    std::istringstream in("cost = numeric\nregion = categorical case\n# note\n\nresource=categorical event\n");
    const auto o = parse_schema_overrides(in);
    CHECK(o.at("cost").kind == AttributeKind::numeric);
    CHECK_FALSE(o.at("cost").scope.has_value());
    CHECK(o.at("region").scope == AttributeScope::case_level);
    CHECK(o.at("resource").scope == AttributeScope::event_level);
    std::istringstream bad("cost = money\n");
    CHECK_THROWS_AS(parse_schema_overrides(bad), ParseError);
}

TEST_CASE("minimal XES") {
    const auto log = read_xes(kData + "/minimal.xes");
    REQUIRE(log.case_count() == 1);
    CHECK(log.cases()[0].id() == "t1");
    CHECK(log.cases()[0].variant() == Variant{"a", "b"});
}

TEST_CASE("XES trace without events is skipped with a warning") {
    Diagnostics d;
    const auto log = read_xes(kData + "/empty_trace.xes", &d);
    CHECK(log.case_count() == 1);
    CHECK(log.cases()[0].id() == "full");
    REQUIRE(d.size() == 1);
    CHECK(d[0].find("hollow") != std::string::npos);
}

TEST_CASE("XES lifecycle and extension attributes match the hand-converted CSV") {
    Diagnostics d;
    const auto xes = read_xes(kData + "/lifecycle.xes", &d);
    const auto csv = read_csv(kData + "/lifecycle.csv");
    CHECK(equivalent(xes, csv));
    const auto& first = xes.find_case("r1")->events()[0];
    CHECK(std::get<std::string>(first.attributes.at("lifecycle:transition")) == "complete");
    CHECK(std::get<std::string>(first.attributes.at("acme:ticket")) == "T-1");
    CHECK(std::get<double>(xes.find_case("r1")->attribute("cost")) == 12.5);
    bool warned = false;
    for (const auto& msg : d) warned = warned || msg.find("acme") != std::string::npos;
    CHECK(warned);
}

TEST_CASE("malformed XES is a parse error") {
    std::istringstream broken("<log><trace><event></trace></log>");
    CHECK_THROWS_AS(read_xes(broken), ParseError);
    std::istringstream no_time(
        "<log><trace><string key=\"concept:name\" value=\"t\"/><event>"
        "<string key=\"concept:name\" value=\"a\"/></event></trace></log>");
    CHECK_THROWS_AS(read_xes(no_time), ParseError);
}

TEST_CASE("read_log dispatches on extension") {
    CHECK(read_log(kData + "/minimal.xes").case_count() == 1);
    CHECK(read_log(kData + "/table2.csv").case_count() == 10);
    CHECK_THROWS_AS(read_log(kData + "/missing.csv"), IoError);
}

TEST_CASE("timestamps") {
    CHECK(parse_timestamp("2021-01-02 12:23", kDefaultTimestampFormat) ==
          Timestamp{std::chrono::seconds{1609590180}});
    CHECK(parse_timestamp("2021-01-02T12:23:00+01:00", kDefaultTimestampFormat) ==
          Timestamp{std::chrono::seconds{1609590180 - 3600}});
    CHECK(parse_timestamp("2021-01-02T12:23:00.250Z", kDefaultTimestampFormat) ==
          Timestamp{std::chrono::seconds{1609590180}});
    CHECK_FALSE(parse_timestamp("2021-13-02 12:23", kDefaultTimestampFormat).has_value());
    CHECK_FALSE(parse_timestamp("soon", kDefaultTimestampFormat).has_value());
    CHECK(parse_timestamp("02/01/2021 12:23", "%d/%m/%Y %H:%M") ==
          Timestamp{std::chrono::seconds{1609590180}});
}
