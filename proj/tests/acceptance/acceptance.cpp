// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "logsample/pipeline.hpp"
#include "logsample/sampler.hpp"
#include "logsample/variant_index.hpp"
#include "properties.hpp"
#include "test_logs.hpp"

using namespace logsample;
using logsample::testing::skewed_log;
using logsample::testing::spearman;
using logsample::testing::table2_log;

namespace {

struct Outcome {
    bool ok = true;
    std::vector<std::string> notes;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            notes.push_back(what);
        }
    }
};

int failures = 0;

void report(const char* name, double limit_seconds, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
        outcome = body();
    } catch (const std::exception& e) {
        outcome.expect(false, std::string("exception: ") + e.what());
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    outcome.expect(elapsed < limit_seconds, "over the time limit");
    if (!outcome.ok) ++failures;
    std::printf("%s  %s (%.3f s, limit %.0f s)\n", outcome.ok ? "PASS" : "FAIL", name, elapsed,
                limit_seconds);
    for (const auto& n : outcome.notes) std::printf("      %s\n", n.c_str());
}

std::set<std::string> ids(const EventLog& log) {
    std::set<std::string> out;
    for (const auto& c : log.cases()) out.insert(c.id());
    return out;
}

Outcome table2_oracle() {
    Outcome o;
    const auto log = table2_log();
    const auto index = build_index(log, {"Amount"});
    o.expect(index.groups.size() == 4, "expected four variant groups");
    if (index.groups.size() != 4) return o;
    const std::vector<std::vector<std::string>> members{
        {"c1", "c10", "c3", "c4", "c9"}, {"c2", "c5", "c8"}, {"c6"}, {"c7"}};
    for (std::size_t g = 0; g < 4; ++g)
        o.expect(index.groups[g].case_ids == members[g], "group E" + std::to_string(g + 1));
    o.expect(index.groups[0].variant == Variant{"a", "b", "c", "d"}, "E1 variant");
    o.expect(index.groups[1].variant == Variant{"a", "c", "b", "d"}, "E2 variant");
    o.expect(index.groups[0].numeric_summaries.at("Amount").mean == 500.0, "E1 mean");
    o.expect(index.groups[1].numeric_summaries.at("Amount").mean == 460.0, "E2 mean");

    const SortStrategy sort = NumericCentroidSort{"Amount", CentroidStatistic::mean};
    o.expect(prioritize(index.groups[0], log, sort) ==
                 std::vector<std::string>{"c3", "c9", "c4", "c1", "c10"},
             "E1 priority order");
    o.expect(prioritize(index.groups[1], log, sort) == std::vector<std::string>{"c5", "c2", "c8"},
             "E2 priority order");

    const auto sampled = [&](SelectionStrategy select) {
        return ids(sample(log, index, SamplingPlan{sort, select, {}}));
    };
    o.expect(sampled(UniqueSelection{}) == std::set<std::string>{"c3", "c5", "c6", "c7"}, "unique set");
    o.expect(sampled(LogarithmicSelection{3}) == std::set<std::string>{"c3", "c9", "c5"}, "log3 set");
    o.expect(sampled(DivisionSelection{4}) == std::set<std::string>{"c3", "c9", "c5", "c6", "c7"},
             "d4 set");
    return o;
}

Outcome property_suite() {
    Outcome o;
    const auto run = logsample::testing::run_property_suite(20240601, 6, 200);
    o.expect(run.generated_cases >= 1000,
             "only " + std::to_string(run.generated_cases) + " generated cases");
    for (const auto& r : run.results) {
        o.expect(r.checks > 0, r.name + ": no checks ran");
        for (const auto& f : r.failures) o.expect(false, r.name + ": " + f);
    }
    return o;
}

// Shared by the directional and performance criteria.
struct SkewedRun {
    std::vector<PlanResult> rows;
    const PlanResult* find(const std::string& label) const {
        for (const auto& r : rows)
            if (r.plan == label) return &r;
        return nullptr;
    }
};

const std::vector<std::string> kPlans{"unique", "log:2", "log:3", "log:5", "log:10",
                                      "div:2",  "div:3", "div:5", "div:10"};

SkewedRun run_skewed() {
    ExperimentConfig config;
    config.folds = 5;
    config.seed = 42;
    config.repetitions = 3;
    for (const auto& p : kPlans) config.plans.push_back(parse_plan(p));
    const auto log = skewed_log(5000, 7);
    return {run_experiment(log, config).aggregate};
}

SkewedRun skewed;

Outcome directional() {
    Outcome o;
    skewed = run_skewed();
    const auto* d2 = skewed.find("d2");
    const auto* d10 = skewed.find("d10");
    const auto* unique = skewed.find("unique");
    const auto* log10 = skewed.find("log10");
    o.expect(d2 && d10 && unique && log10, "missing plan rows");
    if (!o.ok) return o;
    char buf[256];
    std::snprintf(buf, sizeof buf, "r_acc(d2) = %.4f, r_acc(unique) = %.4f", *d2->report.r_acc,
                  *unique->report.r_acc);
    o.notes.push_back(buf);
    std::snprintf(buf, sizeof buf, "R_S(log10) = %.3f, R_S(d10) = %.3f, R_S(d2) = %.3f",
                  log10->report.r_s, d10->report.r_s, d2->report.r_s);
    o.notes.push_back(buf);
    o.expect(*d2->report.r_acc >= 0.95, "r_acc(d2) below 0.95");
    o.expect(*unique->report.r_acc < *d2->report.r_acc, "unique not below d2");
    o.expect(log10->report.r_s > d10->report.r_s && d10->report.r_s > d2->report.r_s,
             "R_S ordering log10 > d10 > d2 broken");
    return o;
}

Outcome performance() {
    Outcome o;
    o.expect(!skewed.rows.empty(), "directional run did not complete");
    if (!o.ok) return o;
    std::vector<double> rs, rfe;
    for (const auto& r : skewed.rows) {
        if (r.report.r_s <= 1) continue;
        rs.push_back(r.report.r_s);
        rfe.push_back(r.report.r_fe);
        char buf[160];
        std::snprintf(buf, sizeof buf, "%-7s R_S %8.3f  R_FE %8.3f  R_t %8.3f", r.plan.c_str(),
                      r.report.r_s, r.report.r_fe, r.report.r_t);
        o.notes.push_back(buf);
        o.expect(r.report.r_fe > 1, r.plan + ": R_FE <= 1");
        o.expect(r.report.r_t > 1, r.plan + ": R_t <= 1");
    }
    o.expect(rs.size() >= 3, "too few size-reducing plans");
    if (rs.size() >= 3) {
        const double rho = spearman(rs, rfe);
        char buf[64];
        std::snprintf(buf, sizeof buf, "Spearman(R_FE, R_S) = %.3f", rho);
        o.notes.push_back(buf);
        o.expect(rho > 0.8, "rank correlation not above 0.8");
    }
    return o;
}

}  // namespace

int main() {
    report("Table 2 oracle suite", 1, table2_oracle);
    report("property suites", 30, property_suite);
    report("directional replication on the skewed synthetic log", 120, directional);
    // Reuses the directional run; only its own checks are timed.
    report("performance direction", 1, performance);
    return failures == 0 ? 0 : 1;
}
