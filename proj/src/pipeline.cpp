#include "logsample/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "logsample/csv.hpp"
#include "logsample/errors.hpp"
#include "number_format.hpp"

namespace logsample {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto pos = text.find(',', start);
        auto item = trim(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (!item.empty()) out.push_back(std::move(item));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

template <class T>
T to_unsigned(const std::string& text, const std::string& key) {
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
        throw UsageError("config key '" + key + "' expects a non-negative integer, got '" + text +
                         "'");
    return value;
}

SamplingPlan with_seed_offset(SamplingPlan plan, std::uint64_t offset) {
    if (auto* r = std::get_if<RandomSort>(&plan.sort)) r->seed += offset;
    if (auto* r = std::get_if<RandomTotalSelection>(&plan.select)) r->seed += offset;
    return plan;
}

std::optional<double> mean_of(const std::vector<std::optional<double>>& values) {
    double sum = 0;
    std::size_t n = 0;
    for (const auto& v : values)
        if (v) {
            sum += *v;
            ++n;
        }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

AbsoluteMetrics average(const std::vector<AbsoluteMetrics>& runs) {
    AbsoluteMetrics m;
    std::vector<std::optional<double>> acc, f1, mae, rmse, fe, tr;
    for (const auto& r : runs) {
        acc.push_back(r.accuracy);
        f1.push_back(r.f1);
        mae.push_back(r.mae_seconds);
        rmse.push_back(r.rmse_seconds);
        fe.push_back(r.feature_extraction_seconds);
        tr.push_back(r.training_seconds);
    }
    m.accuracy = mean_of(acc);
    m.f1 = mean_of(f1);
    m.mae_seconds = mean_of(mae);
    m.rmse_seconds = mean_of(rmse);
    m.feature_extraction_seconds = mean_of(fe).value_or(0);
    m.training_seconds = mean_of(tr).value_or(0);
    return m;
}

/// Extraction and training on `train`, scored on `test_table`.
AbsoluteMetrics timed_run(const EventLog& train, const FeatureSchema& schema,
                          const FeatureTable& test_table, const ExperimentConfig& config) {
    std::optional<FeatureTable> table;
    const double fe = time_seconds([&] { table.emplace(extract(train, schema)); });
    std::optional<BaselineModel> model;
    const double tr = time_seconds([&] { model.emplace(train_baseline(*table, config.ngram_order)); });
    auto metrics = evaluate(*model, test_table, config.averaging);
    metrics.feature_extraction_seconds = fe;
    metrics.training_seconds = tr;
    return metrics;
}

std::string opt(const std::optional<double>& v) {
    return v ? detail::format_number(*v) : std::string{};
}

std::string fold_text(std::size_t fold) {
    return fold == kAllFolds ? std::string("all") : std::to_string(fold);
}

}  // namespace

// ---------------------------------------------------------------------------

SamplingPlan parse_plan(std::string_view text, std::uint64_t seed) {
    std::istringstream in{std::string(text)};
    std::string strategy, sort, extra;
    in >> strategy >> sort >> extra;
    if (strategy.empty()) throw UsageError("empty plan");
    if (!extra.empty()) throw UsageError("plan takes 'STRATEGY [SORT]', got '" + std::string(text) + "'");
    SamplingPlan plan;
    plan.select = parse_selection(strategy, seed);
    if (!sort.empty()) plan.sort = parse_sort(sort, seed);
    return plan;
}

std::string plan_label(const SamplingPlan& plan) {
    auto label = describe(plan.select);
    if (const auto* a = std::get_if<ArrivalSort>(&plan.sort); a && !a->newest_first) return label;
    return label + "/" + describe(plan.sort);
}

ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
    ExperimentConfig config;
    std::map<std::string, std::string> values;
    std::vector<std::string> plan_texts;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        const auto text = trim(raw);
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw UsageError("config line " + std::to_string(line) + ": expected 'key = value'");
        const auto key = trim(std::string_view(text).substr(0, eq));
        const auto value = trim(std::string_view(text).substr(eq + 1));
        if (key == "plan")
            plan_texts.push_back(value);
        else
            values[key] = value;
    }

    auto resolve = [&](const std::string& p) {
        std::filesystem::path path(p);
        return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
    };
    std::string default_sort;
    std::set<std::string> attrs;
    std::uint64_t sampling_seed = 0;
    for (const auto& [key, value] : values) {
        if (key == "input") config.input = resolve(value);
        else if (key == "case_id_column") config.mapping.case_id_column = value;
        else if (key == "activity_column") config.mapping.activity_column = value;
        else if (key == "start_time_column") config.mapping.start_time_column = value;
        else if (key == "complete_time_column") config.mapping.complete_time_column = value;
        else if (key == "event_id_column") config.mapping.event_id_column = value;
        else if (key == "timestamp_format") config.mapping.timestamp_format = value;
        else if (key == "schema") config.mapping.overrides = read_schema_overrides(resolve(value));
        else if (key == "folds") config.folds = to_unsigned<std::size_t>(value, key);
        else if (key == "seed") config.seed = to_unsigned<std::uint64_t>(value, key);
        else if (key == "sampling_seed") sampling_seed = to_unsigned<std::uint64_t>(value, key);
        else if (key == "sort") default_sort = value;
        else if (key == "attrs") {
            auto list = split_list(value);
            attrs.insert(list.begin(), list.end());
        } else if (key == "task") config.features.task = parse_task(value);
        else if (key == "window") config.features.window = to_unsigned<std::size_t>(value, key);
        else if (key == "max_prefix_length")
            config.features.max_prefix_length = to_unsigned<std::size_t>(value, key);
        else if (key == "categorical_attributes")
            config.features.categorical_attributes = split_list(value);
        else if (key == "numeric_attributes") config.features.numeric_attributes = split_list(value);
        else if (key == "outcome") config.features.outcome = OutcomePredicate::parse(value);
        else if (key == "repetitions") config.repetitions = to_unsigned<std::size_t>(value, key);
        else if (key == "order") config.ngram_order = to_unsigned<std::size_t>(value, key);
        else if (key == "f1") {
            if (value == "macro") config.averaging = F1Averaging::macro;
            else if (value == "weighted") config.averaging = F1Averaging::weighted;
            else throw UsageError("f1 must be macro or weighted");
        } else {
            throw UsageError("unknown config key '" + key + "'");
        }
    }
    for (const auto& t : plan_texts) {
        auto plan = parse_plan(t, sampling_seed);
        if (!default_sort.empty() && t.find_first_of(" \t") == std::string::npos)
            plan.sort = parse_sort(default_sort, sampling_seed);
        plan.attributes = attrs;
        config.plans.push_back(std::move(plan));
    }
    return config;
}

ExperimentConfig read_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return parse_config(in, path.parent_path());
}

void validate(const ExperimentConfig& config, const EventLog& log) {
    if (config.plans.empty()) throw UsageError("at least one sampling plan is required");
    if (config.repetitions < 1) throw UsageError("repetitions must be >= 1");
    if (config.folds < 2) throw UsageError("fold count must be >= 2");
    for (const auto& plan : config.plans) validate(plan, log.schema());
}

// ---------------------------------------------------------------------------

ExperimentResult run_experiment(const EventLog& log, const ExperimentConfig& config,
                                const std::function<void(const PlanResult&)>& on_result) {
    validate(config, log);
    ExperimentResult result;
    result.folds = assign_folds(log, config.folds, config.seed);

    // plan index -> per-fold results, for the aggregate
    std::vector<std::vector<const PlanResult*>> by_plan(config.plans.size());
    result.per_fold.reserve(config.folds * config.plans.size());

    for (std::size_t fold = 0; fold < config.folds; ++fold) {
        const auto split = materialize_fold(log, result.folds, fold);
        const auto schema = build_schema(split.train, config.features);
        const auto test_table = extract(split.test, schema);

        std::vector<AbsoluteMetrics> baseline_runs;
        for (std::size_t rep = 0; rep < config.repetitions; ++rep)
            baseline_runs.push_back(timed_run(split.train, schema, test_table, config));
        const auto baseline = average(baseline_runs);

        for (std::size_t p = 0; p < config.plans.size(); ++p) {
            const auto& plan = config.plans[p];
            const auto index = build_index(split.train, index_attributes(plan));
            std::vector<AbsoluteMetrics> sampled_runs;
            std::size_t sampled_cases = 0;
            for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
                // Only the training fold is ever sampled.
                const auto sampled = sample(split.train, index, with_seed_offset(plan, rep));
                sampled_cases += sampled.case_count();
                sampled_runs.push_back(timed_run(sampled, schema, test_table, config));
            }
            PlanResult row;
            row.plan = plan_label(plan);
            row.fold = fold;
            row.train_cases = split.train.case_count();
            row.test_cases = split.test.case_count();
            row.sampled_cases = sampled_cases / config.repetitions;
            const double r_s = static_cast<double>(row.train_cases * config.repetitions) /
                               static_cast<double>(sampled_cases);
            row.report = relative_report(baseline, average(sampled_runs), r_s);
            result.per_fold.push_back(std::move(row));
            if (on_result) on_result(result.per_fold.back());
        }
    }

    for (std::size_t p = 0; p < config.plans.size(); ++p) {
        std::vector<AbsoluteMetrics> base, samp;
        std::size_t train = 0, sampled = 0, test = 0;
        for (std::size_t fold = 0; fold < config.folds; ++fold) {
            const auto& row = result.per_fold[fold * config.plans.size() + p];
            base.push_back(row.report.baseline);
            samp.push_back(row.report.sampled);
            train += row.train_cases;
            sampled += row.sampled_cases;
            test += row.test_cases;
        }
        PlanResult agg;
        agg.plan = plan_label(config.plans[p]);
        agg.fold = kAllFolds;
        agg.train_cases = train;
        agg.sampled_cases = sampled;
        agg.test_cases = test;
        const double r_s = static_cast<double>(train) / static_cast<double>(sampled);
        agg.report = relative_report(average(base), average(samp), r_s);
        result.aggregate.push_back(std::move(agg));
    }
    return result;
}

// ---------------------------------------------------------------------------

std::string report_csv_header() {
    return csv::format_row({"plan", "fold", "train_cases", "sampled_cases", "test_cases", "r_s",
                            "baseline_accuracy", "baseline_f1", "baseline_mae", "baseline_rmse",
                            "sampled_accuracy", "sampled_f1", "sampled_mae", "sampled_rmse",
                            "r_acc", "r_f1", "r_mae", "r_rmse"});
}

std::string report_csv_row(const PlanResult& row) {
    const auto& r = row.report;
    return csv::format_row({row.plan, fold_text(row.fold), std::to_string(row.train_cases),
                            std::to_string(row.sampled_cases), std::to_string(row.test_cases),
                            detail::format_number(r.r_s), opt(r.baseline.accuracy),
                            opt(r.baseline.f1), opt(r.baseline.mae_seconds),
                            opt(r.baseline.rmse_seconds), opt(r.sampled.accuracy),
                            opt(r.sampled.f1), opt(r.sampled.mae_seconds),
                            opt(r.sampled.rmse_seconds), opt(r.r_acc), opt(r.r_f1), opt(r.r_mae),
                            opt(r.r_rmse)});
}

std::string timing_csv_header() {
    return csv::format_row({"plan", "fold", "baseline_fe_seconds", "baseline_train_seconds",
                            "sampled_fe_seconds", "sampled_train_seconds", "r_fe", "r_t"});
}

std::string timing_csv_row(const PlanResult& row) {
    const auto& r = row.report;
    return csv::format_row({row.plan, fold_text(row.fold),
                            detail::format_number(r.baseline.feature_extraction_seconds),
                            detail::format_number(r.baseline.training_seconds),
                            detail::format_number(r.sampled.feature_extraction_seconds),
                            detail::format_number(r.sampled.training_seconds),
                            detail::format_number(r.r_fe), detail::format_number(r.r_t)});
}

void write_report_csv(const std::vector<PlanResult>& rows, std::ostream& out) {
    out << report_csv_header();
    for (const auto& r : rows) out << report_csv_row(r);
}

void write_report_table(const std::vector<PlanResult>& rows, Task task, std::ostream& out) {
    std::vector<std::string> header{"plan", "sampled", "R_S"};
    if (is_classification(task)) {
        header.insert(header.end(), {"Acc(whole)", "Acc(sampled)", "R_Acc", "F1(whole)",
                                     "F1(sampled)", "R_F1"});
    } else {
        header.insert(header.end(), {"MAE(whole)", "MAE(sampled)", "R_MAE", "RMSE(whole)",
                                     "RMSE(sampled)", "R_RMSE"});
    }
    header.insert(header.end(), {"R_FE", "R_t"});

    auto fixed = [](const std::optional<double>& v, int precision = 3) {
        if (!v) return std::string("-");
        std::ostringstream s;
        s << std::fixed << std::setprecision(precision) << *v;
        return s.str();
    };
    std::vector<std::vector<std::string>> cells{header};
    for (const auto& row : rows) {
        const auto& r = row.report;
        std::vector<std::string> line{row.plan, std::to_string(row.sampled_cases), fixed(r.r_s, 2)};
        if (is_classification(task)) {
            line.insert(line.end(), {fixed(r.baseline.accuracy), fixed(r.sampled.accuracy),
                                     fixed(r.r_acc), fixed(r.baseline.f1), fixed(r.sampled.f1),
                                     fixed(r.r_f1)});
        } else {
            line.insert(line.end(), {fixed(r.baseline.mae_seconds, 0),
                                     fixed(r.sampled.mae_seconds, 0), fixed(r.r_mae),
                                     fixed(r.baseline.rmse_seconds, 0),
                                     fixed(r.sampled.rmse_seconds, 0), fixed(r.r_rmse)});
        }
        line.insert(line.end(), {fixed(r.r_fe, 2), fixed(r.r_t, 2)});
        cells.push_back(std::move(line));
    }
    std::vector<std::size_t> widths(header.size(), 0);
    for (const auto& line : cells)
        for (std::size_t i = 0; i < line.size(); ++i) widths[i] = std::max(widths[i], line[i].size());
    for (const auto& line : cells) {
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (i) out << "  ";
            if (i == 0)
                out << std::left << std::setw(static_cast<int>(widths[i])) << line[i];
            else
                out << std::right << std::setw(static_cast<int>(widths[i])) << line[i];
        }
        out << '\n';
    }
}

ExperimentResult run_pipeline(const ExperimentConfig& config, const std::filesystem::path& run_dir) {
    std::error_code ec;
    std::filesystem::create_directories(run_dir, ec);
    if (ec) throw IoError("cannot create '" + run_dir.string() + "': " + ec.message());

    Diagnostics diagnostics;
    const auto log = read_log(config.input, config.mapping, &diagnostics);
    validate(config, log);

    {
        std::ofstream manifest(run_dir / "manifest.txt", std::ios::trunc);
        if (!manifest) throw IoError("cannot write manifest");
        manifest << "version = " << kVersion << '\n'
                 << "input = " << config.input.string() << '\n'
                 << "cases = " << log.case_count() << '\n'
                 << "events = " << log.event_count() << '\n'
                 << "task = " << to_string(config.features.task) << '\n'
                 << "folds = " << config.folds << '\n'
                 << "seed = " << config.seed << '\n'
                 << "repetitions = " << config.repetitions << '\n'
                 << "order = " << config.ngram_order << '\n'
                 << "f1 = " << (config.averaging == F1Averaging::macro ? "macro" : "weighted")
                 << '\n';
        for (const auto& p : config.plans) manifest << "plan = " << plan_label(p) << '\n';
        for (const auto& d : diagnostics) manifest << "warning = " << d << '\n';
    }

    std::ofstream report(run_dir / "report.csv", std::ios::binary | std::ios::trunc);
    std::ofstream timing(run_dir / "timing.csv", std::ios::binary | std::ios::trunc);
    if (!report || !timing) throw IoError("cannot write report files under '" + run_dir.string() + "'");
    report << report_csv_header() << std::flush;
    timing << timing_csv_header() << std::flush;

    auto result = run_experiment(log, config, [&](const PlanResult& row) {
        report << report_csv_row(row) << std::flush;
        timing << timing_csv_row(row) << std::flush;
    });
    for (const auto& row : result.aggregate) {
        report << report_csv_row(row);
        timing << timing_csv_row(row);
    }
    write_folds_csv(result.folds, run_dir / "folds.csv");
    std::ofstream table(run_dir / "report.txt", std::ios::trunc);
    write_report_table(result.aggregate, config.features.task, table);
    return result;
}

}  // namespace logsample
