#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "logsample/timestamp.hpp"

namespace logsample {

/// Missing values are represented by std::monostate.
using AttributeValue = std::variant<std::monostate, std::string, double, Timestamp, bool>;
using AttributeMap = std::map<std::string, AttributeValue>;

enum class AttributeKind { categorical, numeric, timestamp };
enum class AttributeScope { case_level, event_level };

struct AttributeSpec {
    AttributeKind kind = AttributeKind::categorical;
    AttributeScope scope = AttributeScope::event_level;

    friend bool operator==(const AttributeSpec&, const AttributeSpec&) = default;
};

using AttributeSchema = std::map<std::string, AttributeSpec>;

/// User-declared kind and/or scope for one attribute; unset parts are inferred.
struct AttributeOverride {
    std::optional<AttributeKind> kind;
    std::optional<AttributeScope> scope;
};

using SchemaOverrides = std::map<std::string, AttributeOverride>;

/// Activity sequence of a case.
using Variant = std::vector<std::string>;

inline bool is_missing(const AttributeValue& v) { return std::holds_alternative<std::monostate>(v); }

/// Numeric view: numbers as-is, timestamps as epoch seconds, booleans as 0/1.
std::optional<double> numeric_value(const AttributeValue& v);

/// Textual view used for categorical handling and serialization. Missing yields "".
std::string to_string(const AttributeValue& v);

std::string_view to_string(AttributeKind kind);
std::string_view to_string(AttributeScope scope);
std::optional<AttributeKind> parse_attribute_kind(std::string_view text);
std::optional<AttributeScope> parse_attribute_scope(std::string_view text);

/// Joins a variant as `<a,b,c>`.
std::string variant_to_string(const Variant& variant);

struct Event {
    std::string event_id;
    std::string case_id;
    std::string activity;
    Timestamp start_time;
    std::optional<Timestamp> complete_time;
    AttributeMap attributes;

    /// Completion, or start when the event is atomic.
    Timestamp end_time() const { return complete_time.value_or(start_time); }
    double sojourn_seconds() const { return seconds_between(start_time, end_time()); }
};

/// A process instance. Events are kept ordered by (start_time, event_id) and
/// the variant is derived from them at construction.
class Case {
public:
    /// Throws InvariantViolation on empty events, foreign case ids, empty
    /// activities or completion before start.
    Case(std::string id, std::vector<Event> events, AttributeMap attributes = {});

    const std::string& id() const noexcept { return id_; }
    std::span<const Event> events() const noexcept { return events_; }
    const AttributeMap& attributes() const noexcept { return attributes_; }
    const Variant& variant() const noexcept { return variant_; }
    std::vector<std::string> event_ids() const;

    std::size_t size() const noexcept { return events_.size(); }
    Timestamp first_start() const { return events_.front().start_time; }
    /// Latest completion over all events.
    Timestamp last_end() const;

    /// Case attribute, or missing.
    const AttributeValue& attribute(const std::string& name) const;

private:
    std::string id_;
    std::vector<Event> events_;
    AttributeMap attributes_;
    Variant variant_;
};

/// Immutable event log: cases sorted by case id, every event owned by exactly
/// one case.
class EventLog {
public:
    /// Throws InvariantViolation on duplicate case or event ids, EmptyLog when
    /// `cases` is empty.
    EventLog(std::vector<Case> cases, AttributeSchema schema);

    std::span<const Case> cases() const noexcept { return cases_; }
    const AttributeSchema& schema() const noexcept { return schema_; }
    std::size_t case_count() const noexcept { return cases_.size(); }
    std::size_t event_count() const noexcept { return event_count_; }

    const Case* find_case(std::string_view case_id) const;
    std::optional<std::size_t> case_index(std::string_view case_id) const;

    /// Sub-log with the cases at the given positions. Schema is carried over.
    /// Throws EmptyLog when `case_indices` is empty.
    EventLog subset(std::span<const std::size_t> case_indices) const;
    EventLog subset_by_ids(std::span<const std::string> case_ids) const;

    std::optional<AttributeSpec> attribute_spec(const std::string& name) const;

private:
    struct Trusted {};
    EventLog(Trusted, std::vector<Case> cases, AttributeSchema schema);

    std::vector<Case> cases_;
    AttributeSchema schema_;
    std::size_t event_count_ = 0;
};

/// Multiset of variants.
struct SimpleLog {
    std::map<Variant, std::size_t> variant_counts;

    /// Sum of multiplicities.
    std::size_t size() const;
    std::size_t unique_count() const { return variant_counts.size(); }
    std::vector<Variant> unique_variants() const;
};

SimpleLog to_simple_log(const EventLog& log);

/// One parsed input row. Attribute values may be raw strings; kinds are
/// inferred in build_event_log.
struct RawEvent {
    std::optional<std::string> event_id;
    std::string case_id;
    std::string activity;
    std::optional<Timestamp> start_time;
    std::optional<Timestamp> complete_time;
    AttributeMap attributes;
};

struct BuildOptions {
    /// Kind overrides; attributes not named here are inferred. Scope is
    /// decided by where the caller placed the value (event or case map).
    SchemaOverrides overrides;
    std::string timestamp_format{kDefaultTimestampFormat};
};

/// Assembles an EventLog from rows. Events lacking an id get synthesized
/// zero-padded ids assigned in a content-determined order, so row order never
/// affects the result. Attribute kinds: numeric when every non-missing value
/// is a number or parses as one, timestamp when every value is a timestamp,
/// categorical otherwise.
EventLog build_event_log(std::vector<RawEvent> raw_events,
                         std::map<std::string, AttributeMap> raw_case_attrs,
                         const BuildOptions& options = {});

/// Same cases, variants, attributes and timestamps; event ids are ignored.
bool equivalent(const EventLog& a, const EventLog& b);

}  // namespace logsample
