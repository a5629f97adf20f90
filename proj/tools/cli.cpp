#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "logsample/baseline.hpp"
#include "logsample/errors.hpp"
#include "logsample/features.hpp"
#include "logsample/log_io.hpp"
#include "logsample/metrics.hpp"
#include "logsample/pipeline.hpp"
#include "logsample/sampler.hpp"
#include "logsample/splitter.hpp"
#include "logsample/variant_index.hpp"

namespace logsample {

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

struct InputOptions {
    std::string path;
    std::string format = "auto";
    std::string case_col, activity_col, start_col, complete_col, event_id_col, timestamp_format;
    std::string overrides;

    void attach(CLI::App& cmd) {
        cmd.add_option("input", path, "Event log (.csv or .xes)")->required();
        cmd.add_option("--format", format, "auto, csv or xes")
            ->check(CLI::IsMember({"auto", "csv", "xes"}));
        cmd.add_option("--case-col", case_col, "Case id column");
        cmd.add_option("--activity-col", activity_col, "Activity column");
        cmd.add_option("--start-col", start_col, "Start timestamp column");
        cmd.add_option("--complete-col", complete_col, "Complete timestamp column");
        cmd.add_option("--event-id-col", event_id_col, "Event id column");
        cmd.add_option("--timestamp-format", timestamp_format, "strftime-style format");
        cmd.add_option("--overrides", overrides, "Attribute kind/scope override file");
    }

    void apply(CsvColumnMapping& mapping) const {
        if (!case_col.empty()) mapping.case_id_column = case_col;
        if (!activity_col.empty()) mapping.activity_column = activity_col;
        if (!start_col.empty()) mapping.start_time_column = start_col;
        if (!complete_col.empty()) mapping.complete_time_column = complete_col;
        if (!event_id_col.empty()) mapping.event_id_column = event_id_col;
        if (!timestamp_format.empty()) mapping.timestamp_format = timestamp_format;
        if (!overrides.empty()) mapping.overrides = read_schema_overrides(overrides);
    }

    EventLog load(std::ostream& err) const {
        CsvColumnMapping mapping;
        apply(mapping);
        Diagnostics diagnostics;
        EventLog log = [&] {
            if (format == "xes") return read_xes(path, &diagnostics, mapping.overrides);
            if (format == "csv") return read_csv(path, mapping);
            return read_log(path, mapping, &diagnostics);
        }();
        for (const auto& d : diagnostics) err << "warning: " << d << '\n';
        return log;
    }
};

/// Writes to `path`, or to `out` when the path is empty or "-".
template <class Fn>
void with_output(const std::string& path, std::ostream& out, Fn&& fn) {
    if (path.empty() || path == "-") {
        fn(out);
        return;
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot write '" + path + "'");
    fn(file);
    if (!file) throw IoError("write failed for '" + path + "'");
}

F1Averaging parse_averaging(const std::string& text) {
    if (text == "weighted") return F1Averaging::weighted;
    return F1Averaging::macro;
}

std::string opt(const std::optional<double>& v) {
    if (!v) return {};
    std::ostringstream s;
    s.precision(17);
    s << *v;
    return s.str();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Variant-based sampling of event logs for predictive process monitoring",
                 "logsample"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    // stats
    auto* stats = app.add_subcommand("stats", "Per-variant frequencies and attribute summaries");
    InputOptions stats_in;
    stats_in.attach(*stats);
    std::string stats_attrs, stats_out;
    stats->add_option("--attrs", stats_attrs, "Comma-separated attributes to summarize");
    stats->add_option("--out", stats_out, "Output CSV (default stdout)");

    // split
    auto* split = app.add_subcommand("split", "Case-level k-fold assignment");
    InputOptions split_in;
    split_in.attach(*split);
    std::size_t split_folds = 5;
    std::uint64_t split_seed = 42;
    std::string split_out, split_dir;
    split->add_option("--folds", split_folds, "Fold count");
    split->add_option("--seed", split_seed, "Shuffle seed");
    split->add_option("--out", split_out, "Fold CSV (default stdout)");
    split->add_option("--out-dir", split_dir, "Also write train_i.csv/test_i.csv here");

    // sample
    auto* samp = app.add_subcommand("sample", "Variant-based instance selection");
    InputOptions samp_in;
    samp_in.attach(*samp);
    std::string samp_strategy = "unique", samp_sort = "arrival:oldest", samp_attrs, samp_out,
                samp_folds;
    std::uint64_t samp_seed = 0;
    std::size_t samp_fold = 0;
    samp->add_option("--strategy", samp_strategy, "unique | log:K | div:K | rand:N");
    samp->add_option("--sort", samp_sort,
                     "centroid:ATTR[:mean|median] | mode:A,B | arrival:newest | arrival:oldest | "
                     "random");
    samp->add_option("--seed", samp_seed, "Seed for random sorting/selection");
    samp->add_option("--attrs", samp_attrs, "Extra attributes to summarize per variant");
    samp->add_option("--folds-file", samp_folds, "Sample only the training part of a fold");
    samp->add_option("--fold", samp_fold, "Test fold excluded when --folds-file is given");
    samp->add_option("--out", samp_out, "Output CSV (default stdout)");

    // featurize
    auto* feat = app.add_subcommand("featurize", "Prefix feature matrix");
    InputOptions feat_in;
    feat_in.attach(*feat);
    std::string feat_task = "next_activity", feat_outcome, feat_cat, feat_num, feat_schema_in,
                feat_schema_out, feat_out;
    std::size_t feat_window = 5;
    std::optional<std::size_t> feat_max_prefix;
    bool feat_no_cat = false;
    feat->add_option("--task", feat_task, "next_activity | remaining_time | outcome");
    feat->add_option("--outcome", feat_outcome, "Outcome predicate, e.g. Amount>500");
    feat->add_option("--window", feat_window, "Activity window length");
    feat->add_option("--max-prefix", feat_max_prefix, "Longest prefix emitted");
    feat->add_option("--categorical", feat_cat, "Categorical attributes (default: all case-level)");
    feat->add_flag("--no-categorical", feat_no_cat, "Encode no categorical attributes");
    feat->add_option("--numeric", feat_num, "Numeric attributes");
    feat->add_option("--schema-in", feat_schema_in, "Reuse a schema sidecar (test folds)");
    feat->add_option("--schema-out", feat_schema_out, "Schema sidecar path");
    feat->add_option("--out", feat_out, "Feature CSV")->required();

    // train-baseline
    auto* train = app.add_subcommand("train-baseline", "Fit the n-gram / prefix-statistics model");
    std::string train_features, train_schema, train_out;
    std::size_t train_order = kDefaultNgramOrder;
    train->add_option("features", train_features, "Feature CSV")->required();
    train->add_option("--schema", train_schema, "Schema sidecar")->required();
    train->add_option("--order", train_order, "n-gram order");
    train->add_option("--out", train_out, "Model file")->required();

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "Score a model on a feature file");
    std::string eval_features, eval_schema, eval_model, eval_f1 = "macro", eval_out;
    eval->add_option("features", eval_features, "Feature CSV")->required();
    eval->add_option("--schema", eval_schema, "Schema sidecar")->required();
    eval->add_option("--model", eval_model, "Model file")->required();
    eval->add_option("--f1", eval_f1, "macro | weighted")->check(CLI::IsMember({"macro", "weighted"}));
    eval->add_option("--out", eval_out, "Metrics CSV (default stdout)");

    // run
    auto* run = app.add_subcommand("run", "Cross-validated sampling experiment");
    std::string run_config, run_input, run_task, run_outcome, run_f1, run_dir, run_sort;
    std::vector<std::string> run_plans;
    std::optional<std::size_t> run_folds, run_reps, run_window;
    std::optional<std::uint64_t> run_seed;
    InputOptions run_map;
    run->add_option("--config", run_config, "key = value experiment file");
    run->add_option("--input", run_input, "Event log (overrides config)");
    run->add_option("--plan", run_plans, "STRATEGY [SORT]; repeatable, replaces config plans");
    run->add_option("--sort", run_sort, "Sort for plans given without one");
    run->add_option("--folds", run_folds, "Fold count");
    run->add_option("--seed", run_seed, "Fold seed");
    run->add_option("--repetitions", run_reps, "Repetitions per measurement");
    run->add_option("--task", run_task, "next_activity | remaining_time | outcome");
    run->add_option("--outcome", run_outcome, "Outcome predicate");
    run->add_option("--window", run_window, "Activity window length");
    run->add_option("--f1", run_f1, "macro | weighted")->check(CLI::IsMember({"macro", "weighted"}));
    run->add_option("--overrides", run_map.overrides, "Attribute override file");
    run->add_option("--out-dir", run_dir, "Run directory")->required();

    try {
        try {
            app.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            const int code = app.exit(e, out, err);
            return code == 0 ? 0 : kExitUsage;
        }

        if (*stats) {
            const auto log = stats_in.load(err);
            const auto list = split_list(stats_attrs);
            const auto index = build_index(log, {list.begin(), list.end()});
            with_output(stats_out, out, [&](std::ostream& o) { write_index_csv(index, log, o); });
        } else if (*split) {
            const auto log = split_in.load(err);
            const auto folds = assign_folds(log, split_folds, split_seed);
            with_output(split_out, out, [&](std::ostream& o) { write_folds_csv(folds, o); });
            if (!split_dir.empty()) {
                std::filesystem::create_directories(split_dir);
                for (std::size_t f = 0; f < split_folds; ++f) {
                    const auto s = materialize_fold(log, folds, f);
                    const std::filesystem::path dir(split_dir);
                    write_log_csv(s.train, dir / ("train_" + std::to_string(f) + ".csv"));
                    write_log_csv(s.test, dir / ("test_" + std::to_string(f) + ".csv"));
                }
            }
        } else if (*samp) {
            auto log = samp_in.load(err);
            SamplingPlan plan;
            plan.select = parse_selection(samp_strategy, samp_seed);
            plan.sort = parse_sort(samp_sort, samp_seed);
            const auto attrs = split_list(samp_attrs);
            plan.attributes = {attrs.begin(), attrs.end()};
            validate(plan, log.schema());
            if (!samp_folds.empty()) log = materialize_fold(log, read_folds_csv(samp_folds), samp_fold).train;
            const auto sampled = sample(log, plan);
            err << "sampled " << sampled.case_count() << " of " << log.case_count()
                << " cases (R_S = " << size_reduction(log, sampled) << ")\n";
            with_output(samp_out, out, [&](std::ostream& o) { write_log_csv(sampled, o); });
        } else if (*feat) {
            const auto log = feat_in.load(err);
            FeatureSchema schema;
            if (!feat_schema_in.empty()) {
                schema = read_schema(feat_schema_in);
            } else {
                FeatureConfig config;
                config.task = parse_task(feat_task);
                config.window = feat_window;
                config.max_prefix_length = feat_max_prefix;
                if (feat_no_cat)
                    config.categorical_attributes = std::vector<std::string>{};
                else if (!feat_cat.empty())
                    config.categorical_attributes = split_list(feat_cat);
                config.numeric_attributes = split_list(feat_num);
                if (!feat_outcome.empty()) config.outcome = OutcomePredicate::parse(feat_outcome);
                schema = build_schema(log, config);
            }
            const auto table = extract(log, schema);
            write_feature_csv(table, std::filesystem::path(feat_out));
            const auto sidecar = feat_schema_out.empty() ? feat_out + ".schema.json" : feat_schema_out;
            if (feat_schema_in.empty() || !feat_schema_out.empty()) write_schema(schema, sidecar);
            err << table.size() << " rows, " << schema.width() << " features\n";
        } else if (*train) {
            const auto schema = read_schema(train_schema);
            const auto table = read_feature_csv(std::filesystem::path(train_features), schema);
            write_model(train_baseline(table, train_order), std::filesystem::path(train_out));
        } else if (*eval) {
            const auto schema = read_schema(eval_schema);
            const auto table = read_feature_csv(std::filesystem::path(eval_features), schema);
            const auto model = read_model(std::filesystem::path(eval_model), schema);
            const auto m = evaluate(model, table, parse_averaging(eval_f1));
            with_output(eval_out, out, [&](std::ostream& o) {
                o << "rows,accuracy,f1,mae_seconds,rmse_seconds\n"
                  << table.size() << ',' << opt(m.accuracy) << ',' << opt(m.f1) << ','
                  << opt(m.mae_seconds) << ',' << opt(m.rmse_seconds) << '\n';
            });
        } else if (*run) {
            ExperimentConfig config;
            if (!run_config.empty()) config = read_config(run_config);
            if (!run_input.empty()) config.input = run_input;
            if (config.input.empty()) throw UsageError("no input log (use --input or the config)");
            if (!run_map.overrides.empty())
                config.mapping.overrides = read_schema_overrides(run_map.overrides);
            const std::uint64_t sampling_seed = run_seed.value_or(config.seed);
            if (!run_plans.empty()) {
                config.plans.clear();
                for (const auto& p : run_plans) {
                    auto plan = parse_plan(p, sampling_seed);
                    if (!run_sort.empty() && p.find(' ') == std::string::npos)
                        plan.sort = parse_sort(run_sort, sampling_seed);
                    config.plans.push_back(std::move(plan));
                }
            }
            if (run_folds) config.folds = *run_folds;
            if (run_seed) config.seed = *run_seed;
            if (run_reps) config.repetitions = *run_reps;
            if (!run_task.empty()) config.features.task = parse_task(run_task);
            if (!run_outcome.empty()) config.features.outcome = OutcomePredicate::parse(run_outcome);
            if (run_window) config.features.window = *run_window;
            if (!run_f1.empty()) config.averaging = parse_averaging(run_f1);
            const auto result = run_pipeline(config, run_dir);
            write_report_table(result.aggregate, config.features.task, out);
        }
        return 0;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
}

}  // namespace logsample
