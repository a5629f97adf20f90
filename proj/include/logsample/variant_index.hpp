#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "logsample/event_log.hpp"

namespace logsample {

struct NumericSummary {
    double mean = 0;
    double median = 0;
    std::size_t count = 0;  // non-missing cases
};

/// Cases sharing one variant plus per-attribute distributions over them.
struct VariantGroup {
    Variant variant;
    /// Member case ids in log order (ascending id).
    std::vector<std::string> case_ids;
    /// Positions of the members in the source log, parallel to case_ids.
    std::vector<std::size_t> case_indices;
    std::map<std::string, NumericSummary> numeric_summaries;
    /// Value counts. Case-level attributes count cases, event-level ones
    /// count events.
    std::map<std::string, std::map<std::string, std::size_t>> categorical_summaries;

    std::size_t frequency() const noexcept { return case_ids.size(); }

    /// Most frequent value; ties go to the smallest value. Empty when the
    /// attribute has no summary in this group.
    std::string modal_value(const std::string& attribute) const;
};

/// Partition of a log's cases by variant. Groups are ordered by descending
/// frequency, ties by lexicographic variant.
struct VariantIndex {
    std::vector<VariantGroup> groups;
    std::size_t source_case_count = 0;
    std::set<std::string> attributes;
};

/// Throws UnknownAttribute for names missing from the log's schema.
VariantIndex build_index(const EventLog& log, const std::set<std::string>& attributes = {});

/// Per-case numeric value of an attribute: the case value for case-level
/// attributes, the mean over the case's events for event-level ones.
std::optional<double> case_numeric_value(const Case& c, const std::string& attribute,
                                         AttributeScope scope);

/// `stats` output: variant, frequency, then per attribute either
/// mean/median/count columns (numeric) or mode/distinct columns (categorical).
void write_index_csv(const VariantIndex& index, const EventLog& log, std::ostream& out);

}  // namespace logsample
