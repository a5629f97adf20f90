#include "doctest.h"
#include "logsample/errors.hpp"
#include "logsample/event_log.hpp"
#include "test_logs.hpp"

using namespace logsample;
using logsample::testing::at_minute;
using logsample::testing::make_case;

namespace {

RawEvent raw(std::string case_id, std::string activity, long long minute,
             std::optional<std::string> id = std::nullopt) {
    RawEvent e;
    e.event_id = std::move(id);
    e.case_id = std::move(case_id);
    e.activity = std::move(activity);
    e.start_time = at_minute(minute);
    return e;
}

}  // namespace

TEST_CASE("table 1 rows of case 7 give variant a,b,g,e,h") {
    // Timestamps from the example table, as minutes after 2021-01-02 12:00.
    std::vector<RawEvent> rows{raw("7", "a", 23, "35"), raw("7", "b", 30, "36"),
                               raw("7", "g", 45, "37"), raw("8", "a", 23, "39"),
                               raw("7", "e", 65, "40"), raw("7", "h", 81, "41"),
                               raw("8", "b", 30, "42")};
    const auto log = build_event_log(rows, {});
    REQUIRE(log.case_count() == 2);
    CHECK(log.find_case("7")->variant() == Variant{"a", "b", "g", "e", "h"});
    CHECK(log.find_case("8")->variant() == Variant{"a", "b"});
    CHECK(log.find_case("7")->event_ids() == std::vector<std::string>{"35", "36", "37", "40", "41"});
    CHECK(log.event_count() == 7);
}

TEST_CASE("single event log") {
    const auto log = build_event_log({raw("x", "a", 0)}, {});
    REQUIRE(log.case_count() == 1);
    CHECK(log.cases()[0].variant() == Variant{"a"});
    CHECK(to_simple_log(log).variant_counts == std::map<Variant, std::size_t>{{{"a"}, 1}});
}

TEST_CASE("mandatory fields") {
    CHECK_THROWS_AS(build_event_log({raw("x", "", 0)}, {}), MissingMandatoryField);
    CHECK_THROWS_AS(build_event_log({raw("", "a", 0)}, {}), MissingMandatoryField);
    auto no_time = raw("x", "a", 0);
    no_time.start_time.reset();
    CHECK_THROWS_AS(build_event_log({no_time}, {}), MissingMandatoryField);
    CHECK_THROWS_AS(build_event_log({}, {}), EmptyLog);
}

TEST_CASE("case invariants") {
    Event e{"e1", "c", "a", at_minute(5), at_minute(4), {}};
    CHECK_THROWS_AS(Case("c", {e}), InvariantViolation);
    e.complete_time = at_minute(6);
    e.case_id = "other";
    CHECK_THROWS_AS(Case("c", {e}), InvariantViolation);
    CHECK_THROWS_AS(Case("c", {}), InvariantViolation);
}

TEST_CASE("event order ties break by event id") {
    std::vector<RawEvent> rows{raw("c", "late", 0, "e2"), raw("c", "early", 0, "e1"),
                               raw("c", "last", 1, "e0")};
    const auto log = build_event_log(rows, {});
    CHECK(log.cases()[0].variant() == Variant{"early", "late", "last"});
}

TEST_CASE("synthesized event ids do not depend on row order") {
    std::vector<RawEvent> rows{raw("c1", "a", 0), raw("c1", "b", 1), raw("c2", "a", 2)};
    const auto forward = build_event_log(rows, {});
    std::reverse(rows.begin(), rows.end());
    const auto backward = build_event_log(rows, {});
    CHECK(forward.cases()[0].event_ids() == backward.cases()[0].event_ids());
    CHECK(forward.cases()[1].event_ids() == backward.cases()[1].event_ids());
}

TEST_CASE("duplicate ids are rejected") {
    std::vector<Case> cases{make_case("c1", {"a"}, 0), make_case("c1", {"b"}, 1)};
    CHECK_THROWS_AS(EventLog(cases, {}), InvariantViolation);
    std::vector<RawEvent> rows{raw("c1", "a", 0, "e"), raw("c2", "a", 0, "e")};
    CHECK_THROWS_AS(build_event_log(rows, {}), InvariantViolation);
}

TEST_CASE("attribute kinds are inferred unless overridden") {
    auto r1 = raw("c1", "a", 0);
    r1.attributes["cost"] = std::string("12.5");
    r1.attributes["resource"] = std::string("Ann");
    auto r2 = raw("c2", "a", 1);
    r2.attributes["cost"] = std::string("");
    r2.attributes["resource"] = std::string("7");
    std::map<std::string, AttributeMap> case_attrs{
        {"c1", {{"zip", std::string("01234")}, {"due", std::string("2021-01-05 10:00")}}},
        {"c2", {{"zip", std::string("99999")}, {"due", std::string("2021-02-01 00:00")}}}};

    const auto log = build_event_log({r1, r2}, case_attrs);
    CHECK(log.schema().at("cost") == AttributeSpec{AttributeKind::numeric, AttributeScope::event_level});
    CHECK(log.schema().at("resource").kind == AttributeKind::categorical);
    CHECK(log.schema().at("zip") == AttributeSpec{AttributeKind::numeric, AttributeScope::case_level});
    CHECK(log.schema().at("due").kind == AttributeKind::timestamp);
    // Empty cells are missing, not empty strings.
    CHECK(log.find_case("c2")->events()[0].attributes.count("cost") == 0);
    CHECK(std::get<double>(log.find_case("c1")->events()[0].attributes.at("cost")) == 12.5);

    BuildOptions options;
    options.overrides["zip"].kind = AttributeKind::categorical;
    const auto typed = build_event_log({r1, r2}, case_attrs, options);
    CHECK(typed.schema().at("zip").kind == AttributeKind::categorical);
    CHECK(std::get<std::string>(typed.find_case("c1")->attribute("zip")) == "01234");
}

TEST_CASE("an attribute cannot be both case and event level") {
    auto r = raw("c1", "a", 0);
    r.attributes["x"] = std::string("1");
    CHECK_THROWS_AS(build_event_log({r}, {{"c1", {{"x", std::string("2")}}}}), InvariantViolation);
}

TEST_CASE("simple log of the 10-case example") {
    const auto sl = to_simple_log(logsample::testing::table2_log());
    const std::map<Variant, std::size_t> expected{{{"a", "b", "c", "d"}, 5},
                                                  {{"a", "c", "b", "d"}, 3},
                                                  {{"a", "c", "c", "d"}, 1},
                                                  {{"a", "c", "d"}, 1}};
    CHECK(sl.variant_counts == expected);
    CHECK(sl.size() == 10);
    CHECK(sl.unique_count() == 4);
}

TEST_CASE("identical variants collapse in the simple log") {
    const EventLog log({make_case("c1", {"a", "b"}, 0), make_case("c2", {"a", "b"}, 5)}, {});
    const auto sl = to_simple_log(log);
    CHECK(sl.variant_counts.at({"a", "b"}) == 2);
    CHECK(sl.unique_count() == 1);
}

TEST_CASE("subset keeps cases and schema") {
    const auto log = logsample::testing::table2_log();
    const std::vector<std::size_t> keep{0, 2};
    const auto sub = log.subset(keep);
    CHECK(sub.case_count() == 2);
    CHECK(sub.schema() == log.schema());
    CHECK(sub.cases()[0].id() == log.cases()[0].id());
    CHECK_THROWS_AS(log.subset(std::vector<std::size_t>{}), EmptyLog);
    const std::vector<std::string> ids{"c5", "c3"};
    CHECK(log.subset_by_ids(ids).find_case("c5") != nullptr);
}

TEST_CASE("equivalence ignores event ids only") {
    const EventLog a({make_case("c1", {"a", "b"}, 0)}, {});
    auto events = std::vector<Event>(a.cases()[0].events().begin(), a.cases()[0].events().end());
    events[0].event_id = "zz0";
    events[1].event_id = "zz1";
    const EventLog b({Case("c1", events)}, {});
    CHECK(equivalent(a, b));
    const EventLog c({make_case("c1", {"a", "c"}, 0)}, {});
    CHECK_FALSE(equivalent(a, c));
}
