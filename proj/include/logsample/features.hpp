#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "logsample/event_log.hpp"

namespace logsample {

enum class Task { next_activity, remaining_time, outcome };

std::string_view to_string(Task task);
/// Accepts next_activity|remaining_time|outcome. Throws UsageError.
Task parse_task(std::string_view text);

inline bool is_classification(Task task) { return task != Task::remaining_time; }

enum class Comparator { eq, ne, lt, le, gt, ge };

/// Case-level label rule `attribute <op> constant`, e.g. `Amount>500`.
/// Compares numerically when both sides are numbers, as text otherwise.
struct OutcomePredicate {
    std::string attribute;
    Comparator op = Comparator::eq;
    std::string constant;

    bool holds(const AttributeValue& value) const;
    std::string to_string() const;
    /// Throws UsageError.
    static OutcomePredicate parse(std::string_view text);
};

struct FeatureConfig {
    Task task = Task::next_activity;
    /// One-hot window over the last `window` activities.
    std::size_t window = 5;
    /// Longest prefix emitted; unset means the task default (none, or 40 for
    /// remaining_time).
    std::optional<std::size_t> max_prefix_length;
    /// Unset means every case-level categorical attribute of the log.
    std::optional<std::vector<std::string>> categorical_attributes;
    std::vector<std::string> numeric_attributes;
    std::optional<OutcomePredicate> outcome;
};

inline constexpr std::string_view kPadToken = "<pad>";
inline constexpr std::string_view kUnknownToken = "<unk>";
inline constexpr std::string_view kEndToken = "<end>";

/// Temporal measures always present, in this order.
inline constexpr std::string_view kSojournFeature = "sojourn_last";
inline constexpr std::string_view kElapsedFeature = "elapsed";
inline constexpr std::string_view kHourFeature = "hour_of_day";

struct CategoricalFeature {
    std::string attribute;
    AttributeScope scope = AttributeScope::case_level;
    /// Sorted training values; one extra trailing slot takes unseen/missing.
    std::vector<std::string> values;

    std::size_t width() const { return values.size() + 1; }
};

struct NumericFeature {
    std::string name;
    /// Set for attribute-backed features, empty for temporal measures.
    std::optional<AttributeScope> scope;
};

/// Column layout and vocabularies, built from a training log only.
struct FeatureSchema {
    Task task = Task::next_activity;
    std::size_t window = 5;
    std::optional<std::size_t> max_prefix_length;
    std::vector<std::string> activity_vocabulary;
    std::vector<NumericFeature> numeric_features;
    std::vector<CategoricalFeature> categorical_features;
    std::optional<OutcomePredicate> outcome;

    std::size_t vocabulary_size() const { return activity_vocabulary.size(); }
    /// Index of an activity, or vocabulary_size() + 1 (the unknown slot).
    std::size_t activity_slot(const std::string& activity) const;

    std::size_t window_offset() const { return 0; }
    std::size_t slot_width() const { return vocabulary_size() + 2; }
    std::size_t counts_offset() const { return window * slot_width(); }
    std::size_t numeric_offset() const { return counts_offset() + vocabulary_size(); }
    std::size_t categorical_offset() const { return numeric_offset() + numeric_features.size(); }
    /// Length of an encoded feature vector.
    std::size_t width() const;

    /// Class label of a classification target.
    std::string target_label(double target) const;
    /// Inverse of target_label; unknown labels map to the unknown class.
    double target_from_label(const std::string& label) const;

    /// Feature column names (without id and target columns).
    std::vector<std::string> feature_names() const;

    friend bool operator==(const FeatureSchema&, const FeatureSchema&);
};

/// Throws UnknownAttribute, WrongAttributeKind, UsageError (outcome task
/// without predicate) and EmptyLog.
FeatureSchema build_schema(const EventLog& train_log, const FeatureConfig& config);

struct FeatureRow {
    std::string case_id;
    std::size_t prefix_length = 0;
    /// Class index for classification tasks (see FeatureSchema::target_label),
    /// seconds for remaining_time.
    double target = 0;
};

/// Rows ordered by (case id, prefix length) with a row-major feature matrix.
struct FeatureTable {
    FeatureSchema schema;
    std::vector<FeatureRow> rows;
    std::vector<double> values;

    std::size_t size() const { return rows.size(); }
    std::span<const double> features(std::size_t row) const {
        const auto w = schema.width();
        return std::span<const double>(values).subspan(row * w, w);
    }
};

/// Prefix rows for every case. Throws MissingOutcomeLabel.
FeatureTable extract(const EventLog& log, const FeatureSchema& schema);

/// Rows a case of `trace_length` events contributes under `schema`.
std::size_t expected_rows(std::size_t trace_length, const FeatureSchema& schema);

/// Window tokens of an encoded row, oldest first, padding dropped. Unknown
/// activities appear as kUnknownToken.
std::vector<std::string> decode_window(const FeatureSchema& schema, std::span<const double> features);

/// Header: case_id, prefix_length, feature columns, target.
std::vector<std::string> feature_header(const FeatureSchema& schema);

void write_feature_csv(const FeatureTable& table, std::ostream& out);
void write_feature_csv(const FeatureTable& table, const std::filesystem::path& path);
/// Throws SchemaMismatch when the header differs from `schema`.
FeatureTable read_feature_csv(std::istream& in, const FeatureSchema& schema);
FeatureTable read_feature_csv(const std::filesystem::path& path, const FeatureSchema& schema);

/// JSON sidecar so test folds reuse training vocabularies.
std::string schema_to_json(const FeatureSchema& schema);
FeatureSchema schema_from_json(const std::string& text);
void write_schema(const FeatureSchema& schema, const std::filesystem::path& path);
FeatureSchema read_schema(const std::filesystem::path& path);

}  // namespace logsample
