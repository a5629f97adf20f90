#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "logsample/baseline.hpp"
#include "logsample/features.hpp"
#include "logsample/log_io.hpp"
#include "logsample/metrics.hpp"
#include "logsample/sampler.hpp"
#include "logsample/splitter.hpp"

namespace logsample {

/// The sampling grid evaluated against whole training folds.
struct ExperimentConfig {
    std::filesystem::path input;
    CsvColumnMapping mapping;
    std::size_t folds = 5;
    std::uint64_t seed = 42;
    std::vector<SamplingPlan> plans;
    FeatureConfig features;
    std::size_t repetitions = 5;
    std::size_t ngram_order = kDefaultNgramOrder;
    F1Averaging averaging = F1Averaging::macro;
};

/// Flat `key = value` file. Recognized keys: input, case_id_column,
/// activity_column, start_time_column, complete_time_column, event_id_column,
/// timestamp_format, schema, folds, seed, plan (repeatable,
/// `STRATEGY [SORT]`), attrs, task, window, max_prefix_length,
/// categorical_attributes, numeric_attributes, outcome, repetitions, order,
/// f1. Relative paths resolve against `base_dir`. Throws UsageError.
ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
ExperimentConfig read_config(const std::filesystem::path& path);

/// `STRATEGY [SORT]` as used by the config `plan` key.
SamplingPlan parse_plan(std::string_view text, std::uint64_t seed = 0);

/// Display name: the selection label, plus the sort when it is not the default.
std::string plan_label(const SamplingPlan& plan);

/// Throws UsageError when there are no plans or a plan is invalid for the log.
void validate(const ExperimentConfig& config, const EventLog& log);

inline constexpr std::size_t kAllFolds = std::numeric_limits<std::size_t>::max();

struct PlanResult {
    std::string plan;
    std::size_t fold = kAllFolds;  // kAllFolds for the cross-fold aggregate
    std::size_t train_cases = 0;
    std::size_t sampled_cases = 0;
    std::size_t test_cases = 0;
    MetricsReport report;
};

struct ExperimentResult {
    FoldAssignment folds;
    std::vector<PlanResult> per_fold;
    std::vector<PlanResult> aggregate;
};

/// Runs every plan on every fold: whole-fold baseline first, then each plan's
/// sampled training log, both scored on the untouched test fold. Times are
/// means over `repetitions`; seeded strategies use seed + repetition.
/// `on_result` sees each per-fold row as soon as it is complete.
ExperimentResult run_experiment(const EventLog& log, const ExperimentConfig& config,
                                const std::function<void(const PlanResult&)>& on_result = {});

/// Size and quality columns only, so equal seeds give byte-identical files.
void write_report_csv(const std::vector<PlanResult>& rows, std::ostream& out);
std::string report_csv_header();
std::string report_csv_row(const PlanResult& row);
/// Timing columns (feature extraction and training seconds, R_FE, R_t).
std::string timing_csv_header();
std::string timing_csv_row(const PlanResult& row);
/// Aligned plain-text table of the aggregate rows.
void write_report_table(const std::vector<PlanResult>& rows, Task task, std::ostream& out);

/// Loads the input, runs the experiment and writes folds.csv, report.csv,
/// timing.csv, report.txt and manifest.txt under `run_dir`. Rows finished
/// before a failure are already flushed to disk.
ExperimentResult run_pipeline(const ExperimentConfig& config, const std::filesystem::path& run_dir);

inline constexpr std::string_view kVersion = "0.1.0";

}  // namespace logsample
