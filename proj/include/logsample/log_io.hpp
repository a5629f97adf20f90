#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "logsample/event_log.hpp"

namespace logsample {

/// Header prefix marking case-level attribute columns (`case:Amount`).
inline constexpr std::string_view kCaseColumnPrefix = "case:";

/// How CSV columns map onto the event log model. Columns not named here are
/// attributes; their scope comes from `overrides`, then from a `case:` header
/// prefix, and defaults to event level.
struct CsvColumnMapping {
    std::string case_id_column = "case_id";
    std::string activity_column = "activity";
    std::string start_time_column = "start_time";
    /// Used only when present in the header unless set explicitly.
    std::optional<std::string> complete_time_column;
    std::optional<std::string> event_id_column;
    std::string timestamp_format{kDefaultTimestampFormat};
    SchemaOverrides overrides;
};

/// Throws ParseError (with line), MappingError, IoError, EmptyLog and
/// MissingMandatoryField.
EventLog read_csv(const std::filesystem::path& path, const CsvColumnMapping& mapping = {});
EventLog read_csv(std::istream& in, const CsvColumnMapping& mapping = {});

/// Deterministic CSV: columns case_id, event_id, activity, start_time,
/// complete_time, then `case:`-prefixed case attributes and event attributes
/// in name order. Rows follow case order then event order.
void write_log_csv(const EventLog& log, const std::filesystem::path& path);
void write_log_csv(const EventLog& log, std::ostream& out);

/// Non-fatal remarks collected while reading (skipped traces, unknown
/// extensions, unsupported nested values).
using Diagnostics = std::vector<std::string>;

/// Subset of XES: `concept:name` and `time:timestamp` are mandatory on events;
/// every other key becomes a plain attribute. Traces without events are
/// skipped with a diagnostic. Throws ParseError and IoError.
EventLog read_xes(const std::filesystem::path& path, Diagnostics* diagnostics = nullptr,
                  const SchemaOverrides& overrides = {});
EventLog read_xes(std::istream& in, Diagnostics* diagnostics = nullptr,
                  const SchemaOverrides& overrides = {});

/// Flat override file, one entry per line: `name = kind [scope]`, where kind
/// is categorical|numeric|timestamp and scope case|event. `#` starts a
/// comment. A missing scope keeps whatever the reader decides.
SchemaOverrides read_schema_overrides(const std::filesystem::path& path);
SchemaOverrides parse_schema_overrides(std::istream& in);

/// Reads by extension: `.xes` goes through read_xes, anything else read_csv.
EventLog read_log(const std::filesystem::path& path, const CsvColumnMapping& mapping = {},
                  Diagnostics* diagnostics = nullptr);

}  // namespace logsample
