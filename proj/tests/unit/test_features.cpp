#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "logsample/errors.hpp"
#include "logsample/features.hpp"
#include "logsample/log_io.hpp"
#include "logsample/sampler.hpp"
#include "test_logs.hpp"

using namespace logsample;
using logsample::testing::make_case;
using logsample::testing::table2_log;

namespace {

const std::string kData = LOGSAMPLE_TEST_DATA;

FeatureSchema schema_for(const EventLog& log, Task task,
                         std::optional<OutcomePredicate> outcome = std::nullopt) {
    FeatureConfig config;
    config.task = task;
    config.outcome = outcome;
    return build_schema(log, config);
}

std::vector<std::string> targets_of(const FeatureTable& t, const std::string& case_id) {
    std::vector<std::string> out;
    for (const auto& row : t.rows)
        if (row.case_id == case_id) out.push_back(t.schema.target_label(row.target));
    return out;
}

double value_of(const FeatureTable& t, std::size_t row, const std::string& column) {
    const auto names = t.schema.feature_names();
    const auto it = std::find(names.begin(), names.end(), column);
    REQUIRE(it != names.end());
    return t.features(row)[static_cast<std::size_t>(it - names.begin())];
}

EventLog table1_log() {
    CsvColumnMapping m;
    m.case_id_column = "Case-id";
    m.event_id_column = "Event-id";
    m.activity_column = "Activity name";
    m.start_time_column = "Starting time";
    m.complete_time_column = "Finishing time";
    return read_csv(kData + "/table1.csv", m);
}

std::string to_csv(const FeatureTable& t) {
    std::ostringstream out;
    write_feature_csv(t, out);
    return out.str();
}

}  // namespace

TEST_CASE("vocabulary of the 10-case example") {
    const auto schema = schema_for(table2_log(), Task::next_activity);
    CHECK(schema.activity_vocabulary == std::vector<std::string>{"a", "b", "c", "d"});
    CHECK(schema.vocabulary_size() == 4);
    CHECK_FALSE(schema.max_prefix_length.has_value());
}

TEST_CASE("next activity targets include the end of the case") {
    const auto log = table2_log();
    const auto table = extract(log, schema_for(log, Task::next_activity));
    CHECK(targets_of(table, "c1") == std::vector<std::string>{"b", "c", "d", "<end>"});
    CHECK(targets_of(table, "c7") == std::vector<std::string>{"c", "d", "<end>"});
    // 9 cases of length 4 and one of length 3.
    CHECK(table.size() == 9 * 4 + 3);
    // Rows ordered by (case id, prefix length).
    for (std::size_t r = 1; r < table.size(); ++r) {
        const auto& a = table.rows[r - 1];
        const auto& b = table.rows[r];
        CHECK((a.case_id < b.case_id || (a.case_id == b.case_id && a.prefix_length + 1 == b.prefix_length)));
    }
}

TEST_CASE("activities unseen in training use the unknown slot") {
    const auto schema = schema_for(table2_log(), Task::next_activity);
    const EventLog test({make_case("t1", {"a", "z"}, 0)}, {});
    const auto table = extract(test, schema);
    REQUIRE(table.size() == 2);
    CHECK(value_of(table, 1, "w5=<unk>") == 1.0);
    CHECK(value_of(table, 1, "w4=a") == 1.0);
    CHECK(value_of(table, 1, "w3=<pad>") == 1.0);
    CHECK(value_of(table, 1, "count=a") == 1.0);
    CHECK(table.schema.target_label(table.rows[0].target) == "<unk>");
    CHECK(decode_window(schema, table.features(1)) == std::vector<std::string>{"a", "<unk>"});
}

TEST_CASE("temporal measures and remaining time on the 2-case example") {
    const auto log = table1_log();
    const auto schema = schema_for(log, Task::remaining_time);
    CHECK(schema.max_prefix_length == 40u);
    const auto names = schema.feature_names();
    CHECK(std::find(names.begin(), names.end(), "num=sojourn_last") != names.end());
    const auto table = extract(log, schema);
    REQUIRE(table.size() == 7);
    // Case 7, prefix <Register>: 12:23-12:25, case ends 13:22.
    CHECK(table.rows[0].case_id == "7");
    CHECK(value_of(table, 0, "num=sojourn_last") == 120.0);
    CHECK(value_of(table, 0, "num=elapsed") == 120.0);
    CHECK(value_of(table, 0, "num=hour_of_day") == 12.0);
    CHECK(table.rows[0].target == 57 * 60.0);
    CHECK(table.rows[4].target == 0.0);
    // Case 8: Register 12:23-13:15 then Analyze Defect 12:30-13:30.
    CHECK(table.rows[5].case_id == "8");
    CHECK(value_of(table, 5, "num=sojourn_last") == 52 * 60.0);
    CHECK(table.rows[5].target == 15 * 60.0);
    CHECK(value_of(table, 6, "num=elapsed") == 67 * 60.0);
    CHECK(table.rows[6].target == 0.0);
}

TEST_CASE("single-event case has one row with zero remaining time") {
    const EventLog log({make_case("one", {"a"}, 0)}, {});
    const auto table = extract(log, schema_for(log, Task::remaining_time));
    REQUIRE(table.size() == 1);
    CHECK(table.rows[0].target == 0.0);
}

TEST_CASE("outcome predicate on Amount") {
    const auto log = table2_log();
    const auto schema = schema_for(log, Task::outcome, OutcomePredicate::parse("Amount>500"));
    const auto table = extract(log, schema);
    CHECK(targets_of(table, "c1") == std::vector<std::string>{"0", "0", "0", "0"});
    CHECK(targets_of(table, "c10") == std::vector<std::string>{"1", "1", "1", "1"});
    CHECK(targets_of(table, "c6") == std::vector<std::string>{"1", "1", "1", "1"});

    CHECK_THROWS_AS(schema_for(log, Task::outcome), UsageError);
    const EventLog unlabeled({make_case("u", {"a"}, 0)}, log.schema());
    CHECK_THROWS_AS(extract(unlabeled, schema), MissingOutcomeLabel);
}

TEST_CASE("outcome predicate parsing") {
    const auto p = OutcomePredicate::parse("Amount >= 500");
    CHECK(p.attribute == "Amount");
    CHECK(p.op == Comparator::ge);
    CHECK(p.holds(AttributeValue{500.0}));
    CHECK_FALSE(p.holds(AttributeValue{499.0}));
    const auto q = OutcomePredicate::parse("region!=north");
    CHECK(q.holds(AttributeValue{std::string("south")}));
    CHECK_FALSE(q.holds(AttributeValue{std::string("north")}));
    CHECK(OutcomePredicate::parse(p.to_string()).op == p.op);
    CHECK_THROWS_AS(OutcomePredicate::parse("Amount"), UsageError);
    CHECK_THROWS_AS(OutcomePredicate::parse(">5"), UsageError);
}

TEST_CASE("column count follows the schema arithmetic") {
    std::mt19937_64 rng(3);
    const auto log = logsample::testing::random_log(rng, {.cases = 60, .alphabet = 6});
    FeatureConfig config;
    config.window = 4;
    config.numeric_attributes = {"amount", "cost"};
    config.categorical_attributes = std::vector<std::string>{"region", "resource"};
    const auto schema = build_schema(log, config);
    std::set<std::string> regions, resources, acts;
    for (const auto& c : log.cases()) {
        if (const auto& r = c.attribute("region"); !is_missing(r)) regions.insert(to_string(r));
        for (const auto& e : c.events()) {
            acts.insert(e.activity);
            resources.insert(to_string(e.attributes.at("resource")));
        }
    }
    const std::size_t A = acts.size();
    const std::size_t expected = 4 * (A + 1 + 1) + A + (3 + 2) + (regions.size() + 1) +
                                 (resources.size() + 1) + 2 + 1;
    CHECK(feature_header(schema).size() == expected);
    const auto table = extract(log, schema);
    std::istringstream in(to_csv(table));
    std::string header;
    std::getline(in, header);
    CHECK(static_cast<std::size_t>(std::count(header.begin(), header.end(), ',')) + 1 == expected);
}

TEST_CASE("feature files are stable and readable") {
    const auto log = table2_log();
    const auto schema = schema_for(log, Task::next_activity);
    const auto table = extract(log, schema);
    const auto text = to_csv(table);
    CHECK(text == to_csv(extract(log, schema)));
    std::istringstream in(text);
    const auto back = read_feature_csv(in, schema);
    CHECK(back.rows.size() == table.rows.size());
    CHECK(back.values == table.values);
    for (std::size_t r = 0; r < table.size(); ++r) CHECK(back.rows[r].target == table.rows[r].target);

    FeatureTable empty{schema, {}, {}};
    const auto header_only = to_csv(empty);
    CHECK(std::count(header_only.begin(), header_only.end(), '\n') == 1);

    auto other = schema;
    other.window = 3;
    std::istringstream again(text);
    CHECK_THROWS_AS(read_feature_csv(again, other), SchemaMismatch);
}

TEST_CASE("schema sidecar round trip") {
    std::mt19937_64 rng(4);
    const auto log = logsample::testing::random_log(rng, {.cases = 40});
    FeatureConfig config;
    config.task = Task::outcome;
    config.outcome = OutcomePredicate::parse("amount>400");
    config.numeric_attributes = {"cost"};
    config.max_prefix_length = 3;
    const auto schema = build_schema(log, config);
    const auto back = schema_from_json(schema_to_json(schema));
    CHECK(back == schema);
    CHECK(schema_to_json(back) == schema_to_json(schema));
}

TEST_CASE("schema errors") {
    const auto log = table2_log();
    FeatureConfig config;
    config.numeric_attributes = {"Weight"};
    CHECK_THROWS_AS(build_schema(log, config), UnknownAttribute);
    config.numeric_attributes = {};
    config.categorical_attributes = std::vector<std::string>{"Amount"};
    CHECK_THROWS_AS(build_schema(log, config), WrongAttributeKind);
}

TEST_CASE("prefix cap limits rows") {
    const auto log = table2_log();
    FeatureConfig config;
    config.max_prefix_length = 2;
    const auto schema = build_schema(log, config);
    const auto table = extract(log, schema);
    CHECK(table.size() == 20);
    CHECK(expected_rows(4, schema) == 2);
    CHECK(expected_rows(1, schema) == 1);
}

TEST_CASE("a sampled log's rows are a subset of the full log's rows") {
    const auto log = table2_log();
    const auto schema = schema_for(log, Task::next_activity);
    const auto full = extract(log, schema);
    const auto sampled_log =
        sample(log, {NumericCentroidSort{"Amount"}, DivisionSelection{2}, {"Amount"}});
    const auto part = extract(sampled_log, schema);
    std::map<std::pair<std::string, std::size_t>, std::size_t> where;
    for (std::size_t r = 0; r < full.size(); ++r)
        where[{full.rows[r].case_id, full.rows[r].prefix_length}] = r;
    for (std::size_t r = 0; r < part.size(); ++r) {
        const auto it = where.find({part.rows[r].case_id, part.rows[r].prefix_length});
        REQUIRE(it != where.end());
        const auto a = part.features(r);
        const auto b = full.features(it->second);
        CHECK(std::equal(a.begin(), a.end(), b.begin(), b.end()));
        CHECK(part.rows[r].target == full.rows[it->second].target);
    }
}

TEST_CASE("encoding separates different windows and activity multisets") {
    std::mt19937_64 rng(21);
    const auto log = logsample::testing::random_log(
        rng, {.cases = 150, .alphabet = 4, .max_length = 8, .variant_pool = 60, .with_attributes = false});
    FeatureConfig config;
    config.window = 3;
    const auto schema = build_schema(log, config);
    const auto table = extract(log, schema);
    const std::size_t encoded = schema.numeric_offset();
    std::map<std::vector<double>, std::pair<std::vector<std::string>, std::multiset<std::string>>> seen;
    for (const auto& c : log.cases()) {
        for (std::size_t len = 1; len <= c.size(); ++len) {
            std::vector<std::string> suffix;
            for (std::size_t i = len > 3 ? len - 3 : 0; i < len; ++i) suffix.push_back(c.variant()[i]);
            std::multiset<std::string> bag(c.variant().begin(), c.variant().begin() + static_cast<long>(len));
            const auto row = std::find_if(table.rows.begin(), table.rows.end(), [&](const FeatureRow& r) {
                return r.case_id == c.id() && r.prefix_length == len;
            });
            REQUIRE(row != table.rows.end());
            const auto f = table.features(static_cast<std::size_t>(row - table.rows.begin()));
            std::vector<double> key(f.begin(), f.begin() + static_cast<long>(encoded));
            const auto [it, inserted] = seen.emplace(key, std::make_pair(suffix, bag));
            if (!inserted) {
                CHECK(it->second.first == suffix);
                CHECK(it->second.second == bag);
            }
        }
    }
}
