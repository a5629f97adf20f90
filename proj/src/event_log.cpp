#include "logsample/event_log.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <set>
#include <tuple>

#include "logsample/errors.hpp"
#include "number_format.hpp"

namespace logsample {

std::optional<double> numeric_value(const AttributeValue& v) {
    if (const auto* d = std::get_if<double>(&v)) return *d;
    if (const auto* t = std::get_if<Timestamp>(&v))
        return static_cast<double>(t->time_since_epoch().count());
    if (const auto* b = std::get_if<bool>(&v)) return *b ? 1.0 : 0.0;
    return std::nullopt;
}

std::string to_string(const AttributeValue& v) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, std::monostate>)
                return {};
            else if constexpr (std::is_same_v<T, std::string>)
                return x;
            else if constexpr (std::is_same_v<T, double>)
                return detail::format_number(x);
            else if constexpr (std::is_same_v<T, Timestamp>)
                return format_timestamp(x);
            else
                return x ? "true" : "false";
        },
        v);
}

std::string_view to_string(AttributeKind kind) {
    switch (kind) {
        case AttributeKind::categorical: return "categorical";
        case AttributeKind::numeric: return "numeric";
        case AttributeKind::timestamp: return "timestamp";
    }
    return "categorical";
}

std::string_view to_string(AttributeScope scope) {
    return scope == AttributeScope::case_level ? "case" : "event";
}

std::optional<AttributeKind> parse_attribute_kind(std::string_view text) {
    if (text == "categorical") return AttributeKind::categorical;
    if (text == "numeric") return AttributeKind::numeric;
    if (text == "timestamp") return AttributeKind::timestamp;
    return std::nullopt;
}

std::optional<AttributeScope> parse_attribute_scope(std::string_view text) {
    if (text == "case") return AttributeScope::case_level;
    if (text == "event") return AttributeScope::event_level;
    return std::nullopt;
}

std::string variant_to_string(const Variant& variant) {
    std::string out = "<";
    for (std::size_t i = 0; i < variant.size(); ++i) {
        if (i) out += ',';
        out += variant[i];
    }
    out += '>';
    return out;
}

// ---------------------------------------------------------------------------

Case::Case(std::string id, std::vector<Event> events, AttributeMap attributes)
    : id_(std::move(id)), events_(std::move(events)), attributes_(std::move(attributes)) {
    if (events_.empty()) throw InvariantViolation("case '" + id_ + "' has no events");
    for (const auto& e : events_) {
        if (e.case_id != id_)
            throw InvariantViolation("event '" + e.event_id + "' does not belong to case '" + id_ +
                                     "'");
        if (e.activity.empty())
            throw InvariantViolation("event '" + e.event_id + "' has an empty activity");
        if (e.complete_time && *e.complete_time < e.start_time)
            throw InvariantViolation("event '" + e.event_id + "' completes before it starts");
    }
    std::sort(events_.begin(), events_.end(), [](const Event& a, const Event& b) {
        return std::tie(a.start_time, a.event_id) < std::tie(b.start_time, b.event_id);
    });
    variant_.reserve(events_.size());
    for (const auto& e : events_) variant_.push_back(e.activity);
}

std::vector<std::string> Case::event_ids() const {
    std::vector<std::string> ids;
    ids.reserve(events_.size());
    for (const auto& e : events_) ids.push_back(e.event_id);
    return ids;
}

Timestamp Case::last_end() const {
    Timestamp latest = events_.front().end_time();
    for (const auto& e : events_) latest = std::max(latest, e.end_time());
    return latest;
}

const AttributeValue& Case::attribute(const std::string& name) const {
    static const AttributeValue missing{};
    const auto it = attributes_.find(name);
    return it == attributes_.end() ? missing : it->second;
}

// ---------------------------------------------------------------------------

EventLog::EventLog(std::vector<Case> cases, AttributeSchema schema)
    : cases_(std::move(cases)), schema_(std::move(schema)) {
    if (cases_.empty()) throw EmptyLog("event log has no cases");
    std::sort(cases_.begin(), cases_.end(),
              [](const Case& a, const Case& b) { return a.id() < b.id(); });
    for (std::size_t i = 1; i < cases_.size(); ++i)
        if (cases_[i].id() == cases_[i - 1].id())
            throw InvariantViolation("duplicate case id '" + cases_[i].id() + "'");
    std::vector<std::string_view> event_ids;
    for (const auto& c : cases_)
        for (const auto& e : c.events()) event_ids.push_back(e.event_id);
    std::sort(event_ids.begin(), event_ids.end());
    if (auto dup = std::adjacent_find(event_ids.begin(), event_ids.end()); dup != event_ids.end())
        throw InvariantViolation("duplicate event id '" + std::string(*dup) + "'");
    event_count_ = event_ids.size();
}

EventLog::EventLog(Trusted, std::vector<Case> cases, AttributeSchema schema)
    : cases_(std::move(cases)), schema_(std::move(schema)) {
    for (const auto& c : cases_) event_count_ += c.size();
}

const Case* EventLog::find_case(std::string_view case_id) const {
    const auto idx = case_index(case_id);
    return idx ? &cases_[*idx] : nullptr;
}

std::optional<std::size_t> EventLog::case_index(std::string_view case_id) const {
    const auto it = std::lower_bound(cases_.begin(), cases_.end(), case_id,
                                     [](const Case& c, std::string_view id) { return c.id() < id; });
    if (it == cases_.end() || it->id() != case_id) return std::nullopt;
    return static_cast<std::size_t>(it - cases_.begin());
}

EventLog EventLog::subset(std::span<const std::size_t> case_indices) const {
    if (case_indices.empty()) throw EmptyLog("sub-log would have no cases");
    std::vector<std::size_t> sorted(case_indices.begin(), case_indices.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<Case> picked;
    picked.reserve(sorted.size());
    for (auto i : sorted) {
        if (i >= cases_.size()) throw InvariantViolation("case index out of range");
        picked.push_back(cases_[i]);
    }
    return EventLog(Trusted{}, std::move(picked), schema_);
}

EventLog EventLog::subset_by_ids(std::span<const std::string> case_ids) const {
    std::vector<std::size_t> indices;
    indices.reserve(case_ids.size());
    for (const auto& id : case_ids) {
        const auto idx = case_index(id);
        if (!idx) throw InvariantViolation("unknown case id '" + id + "'");
        indices.push_back(*idx);
    }
    return subset(indices);
}

std::optional<AttributeSpec> EventLog::attribute_spec(const std::string& name) const {
    const auto it = schema_.find(name);
    if (it == schema_.end()) return std::nullopt;
    return it->second;
}

// ---------------------------------------------------------------------------

std::size_t SimpleLog::size() const {
    return std::accumulate(variant_counts.begin(), variant_counts.end(), std::size_t{0},
                           [](std::size_t acc, const auto& kv) { return acc + kv.second; });
}

std::vector<Variant> SimpleLog::unique_variants() const {
    std::vector<Variant> out;
    out.reserve(variant_counts.size());
    for (const auto& [v, n] : variant_counts) out.push_back(v);
    return out;
}

SimpleLog to_simple_log(const EventLog& log) {
    SimpleLog sl;
    for (const auto& c : log.cases()) ++sl.variant_counts[c.variant()];
    return sl;
}

// ---------------------------------------------------------------------------

namespace {

std::optional<double> parse_number(const std::string& s) {
    if (s.empty()) return std::nullopt;
    double value = 0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value)) return std::nullopt;
    return value;
}

AttributeValue normalize_missing(AttributeValue v) {
    if (const auto* s = std::get_if<std::string>(&v); s && s->empty()) return std::monostate{};
    return v;
}

AttributeKind infer_kind(const std::vector<const AttributeValue*>& values, const std::string& format) {
    bool all_numeric = true;
    bool all_timestamp = true;
    bool any = false;
    for (const auto* v : values) {
        if (is_missing(*v)) continue;
        any = true;
        const bool is_num =
            std::holds_alternative<double>(*v) ||
            (std::holds_alternative<std::string>(*v) && parse_number(std::get<std::string>(*v)));
        all_numeric = all_numeric && is_num;
        const bool is_time =
            std::holds_alternative<Timestamp>(*v) ||
            (std::holds_alternative<std::string>(*v) && parse_timestamp(std::get<std::string>(*v), format));
        all_timestamp = all_timestamp && is_time;
    }
    if (!any) return AttributeKind::categorical;
    if (all_numeric) return AttributeKind::numeric;
    if (all_timestamp) return AttributeKind::timestamp;
    return AttributeKind::categorical;
}

AttributeValue convert(const AttributeValue& v, AttributeKind kind, const std::string& name,
                       const std::string& format) {
    if (is_missing(v)) return v;
    switch (kind) {
        case AttributeKind::numeric: {
            if (auto n = numeric_value(v)) return *n;
            if (auto n = parse_number(std::get<std::string>(v))) return *n;
            throw ParseError(0, "attribute '" + name + "': '" + to_string(v) + "' is not numeric");
        }
        case AttributeKind::timestamp: {
            if (std::holds_alternative<Timestamp>(v)) return v;
            if (const auto* s = std::get_if<std::string>(&v))
                if (auto t = parse_timestamp(*s, format)) return *t;
            throw ParseError(0,
                             "attribute '" + name + "': '" + to_string(v) + "' is not a timestamp");
        }
        case AttributeKind::categorical:
            if (std::holds_alternative<std::string>(v) || std::holds_alternative<bool>(v)) return v;
            return to_string(v);
    }
    return v;
}

std::string attributes_key(const AttributeMap& attrs) {
    std::string key;
    for (const auto& [k, v] : attrs) {
        key += k;
        key += '\x1f';
        key += std::to_string(v.index());
        key += to_string(v);
        key += '\x1e';
    }
    return key;
}

}  // namespace

EventLog build_event_log(std::vector<RawEvent> raw_events,
                         std::map<std::string, AttributeMap> raw_case_attrs,
                         const BuildOptions& options) {
    if (raw_events.empty()) throw EmptyLog("no events");
    for (std::size_t i = 0; i < raw_events.size(); ++i) {
        const auto& r = raw_events[i];
        const auto where = " (record " + std::to_string(i + 1) + ")";
        if (r.case_id.empty()) throw MissingMandatoryField("missing case id" + where);
        if (r.activity.empty()) throw MissingMandatoryField("missing activity" + where);
        if (!r.start_time) throw MissingMandatoryField("missing start time" + where);
    }

    std::set<std::string> case_ids;
    for (const auto& r : raw_events) case_ids.insert(r.case_id);
    std::erase_if(raw_case_attrs, [&](const auto& kv) { return !case_ids.count(kv.first); });

    // Gather every value per attribute to decide kinds.
    std::map<std::string, std::vector<AttributeValue*>> event_values;
    std::map<std::string, std::vector<AttributeValue*>> case_values;
    for (auto& r : raw_events)
        for (auto& [k, v] : r.attributes) {
            v = normalize_missing(std::move(v));
            event_values[k].push_back(&v);
        }
    for (auto& [cid, attrs] : raw_case_attrs)
        for (auto& [k, v] : attrs) {
            v = normalize_missing(std::move(v));
            case_values[k].push_back(&v);
        }

    AttributeSchema schema;
    auto settle = [&](auto& values_by_name, AttributeScope scope) {
        for (auto& [name, values] : values_by_name) {
            if (schema.count(name))
                throw InvariantViolation("attribute '" + name +
                                         "' appears at both case and event level");
            AttributeKind kind;
            if (auto it = options.overrides.find(name);
                it != options.overrides.end() && it->second.kind) {
                kind = *it->second.kind;
            } else {
                std::vector<const AttributeValue*> view(values.begin(), values.end());
                kind = infer_kind(view, options.timestamp_format);
            }
            for (auto* v : values) *v = convert(*v, kind, name, options.timestamp_format);
            schema[name] = AttributeSpec{kind, scope};
        }
    };
    settle(case_values, AttributeScope::case_level);
    settle(event_values, AttributeScope::event_level);

    std::sort(raw_events.begin(), raw_events.end(), [](const RawEvent& a, const RawEvent& b) {
        if (a.case_id != b.case_id) return a.case_id < b.case_id;
        if (a.start_time != b.start_time) return *a.start_time < *b.start_time;
        if (a.complete_time != b.complete_time) return a.complete_time < b.complete_time;
        if (a.activity != b.activity) return a.activity < b.activity;
        if (a.event_id != b.event_id) return a.event_id < b.event_id;
        return attributes_key(a.attributes) < attributes_key(b.attributes);
    });

    const std::size_t width = std::to_string(raw_events.size()).size();
    std::map<std::string, std::vector<Event>> grouped;
    for (std::size_t i = 0; i < raw_events.size(); ++i) {
        auto& r = raw_events[i];
        Event e;
        if (r.event_id) {
            e.event_id = *r.event_id;
        } else {
            auto n = std::to_string(i + 1);
            e.event_id = "e" + std::string(width - n.size(), '0') + n;
        }
        e.case_id = r.case_id;
        e.activity = std::move(r.activity);
        e.start_time = *r.start_time;
        e.complete_time = r.complete_time;
        e.attributes = std::move(r.attributes);
        std::erase_if(e.attributes, [](const auto& kv) { return is_missing(kv.second); });
        grouped[r.case_id].push_back(std::move(e));
    }

    std::vector<Case> cases;
    cases.reserve(grouped.size());
    for (auto& [cid, events] : grouped) {
        AttributeMap attrs;
        if (auto it = raw_case_attrs.find(cid); it != raw_case_attrs.end()) {
            attrs = std::move(it->second);
            std::erase_if(attrs, [](const auto& kv) { return is_missing(kv.second); });
        }
        cases.emplace_back(cid, std::move(events), std::move(attrs));
    }
    return EventLog(std::move(cases), std::move(schema));
}

bool equivalent(const EventLog& a, const EventLog& b) {
    if (a.schema() != b.schema() || a.case_count() != b.case_count()) return false;
    for (std::size_t i = 0; i < a.case_count(); ++i) {
        const auto& ca = a.cases()[i];
        const auto& cb = b.cases()[i];
        if (ca.id() != cb.id() || ca.attributes() != cb.attributes() || ca.size() != cb.size())
            return false;
        for (std::size_t j = 0; j < ca.size(); ++j) {
            const auto& ea = ca.events()[j];
            const auto& eb = cb.events()[j];
            if (ea.activity != eb.activity || ea.start_time != eb.start_time ||
                ea.complete_time != eb.complete_time || ea.attributes != eb.attributes)
                return false;
        }
    }
    return true;
}

}  // namespace logsample
