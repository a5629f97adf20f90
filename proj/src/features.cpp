#include "logsample/features.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "logsample/csv.hpp"
#include "logsample/errors.hpp"
#include "number_format.hpp"

namespace logsample {

std::string_view to_string(Task task) {
    switch (task) {
        case Task::next_activity: return "next_activity";
        case Task::remaining_time: return "remaining_time";
        case Task::outcome: return "outcome";
    }
    return "next_activity";
}

Task parse_task(std::string_view text) {
    if (text == "next_activity") return Task::next_activity;
    if (text == "remaining_time") return Task::remaining_time;
    if (text == "outcome") return Task::outcome;
    throw UsageError("unknown task '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------

namespace {

std::optional<double> to_number(std::string_view s) {
    double v = 0;
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

template <class T>
bool compare(const T& a, const T& b, Comparator op) {
    switch (op) {
        case Comparator::eq: return a == b;
        case Comparator::ne: return a != b;
        case Comparator::lt: return a < b;
        case Comparator::le: return a <= b;
        case Comparator::gt: return a > b;
        case Comparator::ge: return a >= b;
    }
    return false;
}

std::string_view op_text(Comparator op) {
    switch (op) {
        case Comparator::eq: return "==";
        case Comparator::ne: return "!=";
        case Comparator::lt: return "<";
        case Comparator::le: return "<=";
        case Comparator::gt: return ">";
        case Comparator::ge: return ">=";
    }
    return "==";
}

}  // namespace

bool OutcomePredicate::holds(const AttributeValue& value) const {
    const auto lhs = numeric_value(value);
    const auto rhs = to_number(constant);
    if (lhs && rhs && !std::holds_alternative<bool>(value)) return compare(*lhs, *rhs, op);
    return compare(logsample::to_string(value), constant, op);
}

std::string OutcomePredicate::to_string() const {
    return attribute + std::string(op_text(op)) + constant;
}

OutcomePredicate OutcomePredicate::parse(std::string_view text) {
    const auto trim = [](std::string_view v) {
        while (!v.empty() && std::isspace(static_cast<unsigned char>(v.front()))) v.remove_prefix(1);
        while (!v.empty() && std::isspace(static_cast<unsigned char>(v.back()))) v.remove_suffix(1);
        return std::string(v);
    };
    const auto pos = text.find_first_of("=!<>");
    if (pos == std::string_view::npos || pos == 0)
        throw UsageError("expected ATTR<op>VALUE, got '" + std::string(text) + "'");
    OutcomePredicate p;
    p.attribute = trim(text.substr(0, pos));
    if (p.attribute.empty()) throw UsageError("missing attribute in '" + std::string(text) + "'");
    auto rest = text.substr(pos);
    static constexpr std::pair<std::string_view, Comparator> ops[] = {
        {"==", Comparator::eq}, {"!=", Comparator::ne}, {"<=", Comparator::le},
        {">=", Comparator::ge}, {"<", Comparator::lt},  {">", Comparator::gt},
        {"=", Comparator::eq}};
    for (const auto& [sym, op] : ops) {
        if (rest.starts_with(sym)) {
            p.op = op;
            p.constant = trim(rest.substr(sym.size()));
            if (p.constant.empty()) throw UsageError("missing constant in '" + std::string(text) + "'");
            return p;
        }
    }
    throw UsageError("bad comparator in '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------

std::size_t FeatureSchema::activity_slot(const std::string& activity) const {
    const auto it =
        std::lower_bound(activity_vocabulary.begin(), activity_vocabulary.end(), activity);
    if (it == activity_vocabulary.end() || *it != activity) return vocabulary_size() + 1;
    return static_cast<std::size_t>(it - activity_vocabulary.begin());
}

std::size_t FeatureSchema::width() const {
    std::size_t w = categorical_offset();
    for (const auto& c : categorical_features) w += c.width();
    return w;
}

std::string FeatureSchema::target_label(double target) const {
    if (task == Task::remaining_time) return detail::format_number(target);
    if (task == Task::outcome) return target != 0 ? "1" : "0";
    const auto idx = static_cast<std::size_t>(target);
    if (idx < vocabulary_size()) return activity_vocabulary[idx];
    if (idx == vocabulary_size()) return std::string(kEndToken);
    return std::string(kUnknownToken);
}

double FeatureSchema::target_from_label(const std::string& label) const {
    if (task == Task::outcome) return label == "1" ? 1.0 : 0.0;
    if (task == Task::remaining_time) return to_number(label).value_or(0.0);
    if (label == kEndToken) return static_cast<double>(vocabulary_size());
    return static_cast<double>(activity_slot(label));
}

std::vector<std::string> FeatureSchema::feature_names() const {
    std::vector<std::string> names;
    names.reserve(width());
    for (std::size_t s = 0; s < window; ++s) {
        const auto prefix = "w" + std::to_string(s + 1) + "=";
        for (const auto& a : activity_vocabulary) names.push_back(prefix + a);
        names.push_back(prefix + std::string(kPadToken));
        names.push_back(prefix + std::string(kUnknownToken));
    }
    for (const auto& a : activity_vocabulary) names.push_back("count=" + a);
    for (const auto& n : numeric_features) names.push_back("num=" + n.name);
    for (const auto& c : categorical_features) {
        for (const auto& v : c.values) names.push_back("cat=" + c.attribute + "=" + v);
        names.push_back("cat=" + c.attribute + "=" + std::string(kUnknownToken));
    }
    return names;
}

namespace {

bool same_numeric(const NumericFeature& a, const NumericFeature& b) {
    return a.name == b.name && a.scope == b.scope;
}

bool same_categorical(const CategoricalFeature& a, const CategoricalFeature& b) {
    return a.attribute == b.attribute && a.scope == b.scope && a.values == b.values;
}

bool same_predicate(const std::optional<OutcomePredicate>& a,
                    const std::optional<OutcomePredicate>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || a->to_string() == b->to_string();
}

}  // namespace

bool operator==(const FeatureSchema& a, const FeatureSchema& b) {
    return a.task == b.task && a.window == b.window && a.max_prefix_length == b.max_prefix_length &&
           a.activity_vocabulary == b.activity_vocabulary &&
           std::equal(a.numeric_features.begin(), a.numeric_features.end(),
                      b.numeric_features.begin(), b.numeric_features.end(), same_numeric) &&
           std::equal(a.categorical_features.begin(), a.categorical_features.end(),
                      b.categorical_features.begin(), b.categorical_features.end(),
                      same_categorical) &&
           same_predicate(a.outcome, b.outcome);
}

// ---------------------------------------------------------------------------

FeatureSchema build_schema(const EventLog& train_log, const FeatureConfig& config) {
    if (config.window < 1) throw UsageError("window must be >= 1");
    if (config.max_prefix_length && *config.max_prefix_length < 1)
        throw UsageError("max prefix length must be >= 1");

    FeatureSchema schema;
    schema.task = config.task;
    schema.window = config.window;
    schema.max_prefix_length = config.max_prefix_length;
    if (!schema.max_prefix_length && config.task == Task::remaining_time)
        schema.max_prefix_length = 40;

    std::set<std::string> activities;
    for (const auto& c : train_log.cases())
        for (const auto& a : c.variant()) activities.insert(a);
    schema.activity_vocabulary.assign(activities.begin(), activities.end());

    schema.numeric_features = {{std::string(kSojournFeature), std::nullopt},
                               {std::string(kElapsedFeature), std::nullopt},
                               {std::string(kHourFeature), std::nullopt}};
    for (const auto& name : config.numeric_attributes) {
        const auto spec = train_log.attribute_spec(name);
        if (!spec) throw UnknownAttribute(name);
        if (spec->kind == AttributeKind::categorical)
            throw WrongAttributeKind("numeric feature '" + name + "' is categorical");
        schema.numeric_features.push_back({name, spec->scope});
    }

    std::vector<std::string> categorical;
    if (config.categorical_attributes) {
        categorical = *config.categorical_attributes;
    } else {
        for (const auto& [name, spec] : train_log.schema())
            if (spec.scope == AttributeScope::case_level && spec.kind == AttributeKind::categorical)
                categorical.push_back(name);
    }
    for (const auto& name : categorical) {
        const auto spec = train_log.attribute_spec(name);
        if (!spec) throw UnknownAttribute(name);
        if (spec->kind != AttributeKind::categorical)
            throw WrongAttributeKind("categorical feature '" + name + "' is not categorical");
        std::set<std::string> values;
        for (const auto& c : train_log.cases()) {
            if (spec->scope == AttributeScope::case_level) {
                if (const auto& v = c.attribute(name); !is_missing(v)) values.insert(to_string(v));
                continue;
            }
            for (const auto& e : c.events())
                if (auto it = e.attributes.find(name); it != e.attributes.end())
                    values.insert(to_string(it->second));
        }
        schema.categorical_features.push_back(
            {name, spec->scope, std::vector<std::string>(values.begin(), values.end())});
    }

    if (config.task == Task::outcome) {
        if (!config.outcome) throw UsageError("outcome task needs a label predicate");
        if (!train_log.attribute_spec(config.outcome->attribute))
            throw UnknownAttribute(config.outcome->attribute);
        schema.outcome = config.outcome;
    }
    return schema;
}

std::size_t expected_rows(std::size_t trace_length, const FeatureSchema& schema) {
    return schema.max_prefix_length ? std::min(trace_length, *schema.max_prefix_length)
                                    : trace_length;
}

FeatureTable extract(const EventLog& log, const FeatureSchema& schema) {
    FeatureTable table;
    table.schema = schema;
    const std::size_t width = schema.width();
    const std::size_t vocab = schema.vocabulary_size();

    std::size_t total_rows = 0;
    for (const auto& c : log.cases()) total_rows += expected_rows(c.size(), schema);
    table.rows.reserve(total_rows);
    table.values.assign(total_rows * width, 0.0);

    std::vector<std::size_t> slots;
    std::vector<double> counts(vocab);
    std::size_t row_index = 0;
    for (const auto& c : log.cases()) {
        const auto events = c.events();
        const std::size_t m = events.size();
        const std::size_t rows = expected_rows(m, schema);

        double outcome_target = 0;
        if (schema.task == Task::outcome) {
            const auto& label = c.attribute(schema.outcome->attribute);
            if (is_missing(label))
                throw MissingOutcomeLabel("case '" + c.id() + "' lacks '" +
                                          schema.outcome->attribute + "'");
            outcome_target = schema.outcome->holds(label) ? 1.0 : 0.0;
        }

        slots.clear();
        for (const auto& e : events) slots.push_back(schema.activity_slot(e.activity));
        std::fill(counts.begin(), counts.end(), 0.0);
        const Timestamp case_start = c.first_start();
        const Timestamp case_end = c.last_end();

        // Event-level attribute values carried forward through the prefix.
        std::vector<std::optional<double>> numeric_carry(schema.numeric_features.size());
        std::vector<std::optional<std::string>> categorical_carry(
            schema.categorical_features.size());

        for (std::size_t len = 1; len <= rows; ++len, ++row_index) {
            const Event& last = events[len - 1];
            if (slots[len - 1] < vocab) counts[slots[len - 1]] += 1;
            double* out = table.values.data() + row_index * width;

            for (std::size_t s = 0; s < schema.window; ++s) {
                const auto back = schema.window - s;  // 1 = most recent
                const std::size_t slot =
                    back > len ? vocab : slots[len - back];  // vocab = PAD position
                out[s * schema.slot_width() + slot] = 1.0;
            }
            std::copy(counts.begin(), counts.end(), out + schema.counts_offset());

            double* num = out + schema.numeric_offset();
            for (std::size_t i = 0; i < schema.numeric_features.size(); ++i) {
                const auto& f = schema.numeric_features[i];
                if (!f.scope) {
                    if (f.name == kSojournFeature)
                        num[i] = last.sojourn_seconds();
                    else if (f.name == kElapsedFeature)
                        num[i] = seconds_between(case_start, last.end_time());
                    else if (f.name == kHourFeature)
                        num[i] = static_cast<double>(
                            (last.start_time.time_since_epoch().count() % 86400 + 86400) % 86400 /
                            3600);
                    continue;
                }
                if (*f.scope == AttributeScope::case_level) {
                    num[i] = numeric_value(c.attribute(f.name)).value_or(0.0);
                    continue;
                }
                if (auto it = last.attributes.find(f.name); it != last.attributes.end())
                    if (auto v = numeric_value(it->second)) numeric_carry[i] = v;
                num[i] = numeric_carry[i].value_or(0.0);
            }

            double* cat = out + schema.categorical_offset();
            for (std::size_t i = 0; i < schema.categorical_features.size(); ++i) {
                const auto& f = schema.categorical_features[i];
                std::optional<std::string> value;
                if (f.scope == AttributeScope::case_level) {
                    if (const auto& v = c.attribute(f.attribute); !is_missing(v))
                        value = to_string(v);
                } else {
                    if (auto it = last.attributes.find(f.attribute); it != last.attributes.end())
                        categorical_carry[i] = to_string(it->second);
                    value = categorical_carry[i];
                }
                std::size_t pos = f.values.size();
                if (value) {
                    const auto it = std::lower_bound(f.values.begin(), f.values.end(), *value);
                    if (it != f.values.end() && *it == *value)
                        pos = static_cast<std::size_t>(it - f.values.begin());
                }
                cat[pos] = 1.0;
                cat += f.width();
            }

            double target = 0;
            switch (schema.task) {
                case Task::next_activity:
                    target = static_cast<double>(len < m ? slots[len] : vocab);
                    break;
                case Task::remaining_time:
                    target = seconds_between(last.end_time(), case_end);
                    break;
                case Task::outcome:
                    target = outcome_target;
                    break;
            }
            table.rows.push_back(FeatureRow{c.id(), len, target});
        }
    }
    return table;
}

std::vector<std::string> decode_window(const FeatureSchema& schema,
                                       std::span<const double> features) {
    std::vector<std::string> tokens;
    const std::size_t vocab = schema.vocabulary_size();
    for (std::size_t s = 0; s < schema.window; ++s) {
        const auto slot = features.subspan(s * schema.slot_width(), schema.slot_width());
        const auto hot = static_cast<std::size_t>(
            std::max_element(slot.begin(), slot.end()) - slot.begin());
        if (hot == vocab) continue;
        tokens.push_back(hot < vocab ? schema.activity_vocabulary[hot]
                                     : std::string(kUnknownToken));
    }
    return tokens;
}

// ---------------------------------------------------------------------------

std::vector<std::string> feature_header(const FeatureSchema& schema) {
    std::vector<std::string> header{"case_id", "prefix_length"};
    auto names = schema.feature_names();
    header.insert(header.end(), names.begin(), names.end());
    header.emplace_back("target");
    return header;
}

void write_feature_csv(const FeatureTable& table, std::ostream& out) {
    out << csv::format_row(feature_header(table.schema));
    std::string line;
    for (std::size_t r = 0; r < table.size(); ++r) {
        line.clear();
        line += csv::escape(table.rows[r].case_id);
        line += ',';
        line += std::to_string(table.rows[r].prefix_length);
        for (double v : table.features(r)) {
            line += ',';
            line += detail::format_number(v);
        }
        line += ',';
        line += csv::escape(table.schema.target_label(table.rows[r].target));
        line += '\n';
        out << line;
    }
}

void write_feature_csv(const FeatureTable& table, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    write_feature_csv(table, out);
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

FeatureTable read_feature_csv(std::istream& in, const FeatureSchema& schema) {
    csv::Reader reader(in);
    const auto header = reader.next();
    const auto expected = feature_header(schema);
    if (!header || *header != expected)
        throw SchemaMismatch("feature file header does not match the schema");
    FeatureTable table;
    table.schema = schema;
    const std::size_t width = schema.width();
    while (auto row = reader.next()) {
        if (row->size() != expected.size())
            throw ParseError(reader.line(), "expected " + std::to_string(expected.size()) +
                                                " fields, got " + std::to_string(row->size()));
        const auto prefix = to_number((*row)[1]);
        if (!prefix || *prefix < 1) throw ParseError(reader.line(), "bad prefix_length");
        for (std::size_t i = 0; i < width; ++i) {
            const auto v = to_number((*row)[2 + i]);
            if (!v) throw ParseError(reader.line(), "bad value in column " + expected[2 + i]);
            table.values.push_back(*v);
        }
        const auto& target_text = row->back();
        if (schema.task == Task::remaining_time && !to_number(target_text))
            throw ParseError(reader.line(), "bad target '" + target_text + "'");
        table.rows.push_back(FeatureRow{(*row)[0], static_cast<std::size_t>(*prefix),
                                        schema.target_from_label(target_text)});
    }
    return table;
}

FeatureTable read_feature_csv(const std::filesystem::path& path, const FeatureSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return read_feature_csv(in, schema);
}

// ---------------------------------------------------------------------------

std::string schema_to_json(const FeatureSchema& schema) {
    using nlohmann::json;
    json j;
    j["task"] = std::string(to_string(schema.task));
    j["window"] = schema.window;
    j["max_prefix_length"] =
        schema.max_prefix_length ? json(*schema.max_prefix_length) : json(nullptr);
    j["activity_vocabulary"] = schema.activity_vocabulary;
    j["numeric_features"] = json::array();
    for (const auto& n : schema.numeric_features)
        j["numeric_features"].push_back(
            {{"name", n.name},
             {"scope", n.scope ? json(std::string(to_string(*n.scope))) : json(nullptr)}});
    j["categorical_features"] = json::array();
    for (const auto& c : schema.categorical_features)
        j["categorical_features"].push_back({{"attribute", c.attribute},
                                             {"scope", std::string(to_string(c.scope))},
                                             {"values", c.values}});
    j["outcome"] = schema.outcome ? json(schema.outcome->to_string()) : json(nullptr);
    return j.dump(2) + "\n";
}

FeatureSchema schema_from_json(const std::string& text) {
    using nlohmann::json;
    try {
        const auto j = json::parse(text);
        FeatureSchema s;
        s.task = parse_task(j.at("task").get<std::string>());
        s.window = j.at("window").get<std::size_t>();
        if (!j.at("max_prefix_length").is_null())
            s.max_prefix_length = j.at("max_prefix_length").get<std::size_t>();
        s.activity_vocabulary = j.at("activity_vocabulary").get<std::vector<std::string>>();
        auto scope_of = [](const json& v) {
            auto scope = parse_attribute_scope(v.get<std::string>());
            if (!scope) throw SchemaMismatch("bad scope in schema");
            return *scope;
        };
        for (const auto& n : j.at("numeric_features")) {
            NumericFeature f{n.at("name").get<std::string>(), std::nullopt};
            if (!n.at("scope").is_null()) f.scope = scope_of(n.at("scope"));
            s.numeric_features.push_back(std::move(f));
        }
        for (const auto& c : j.at("categorical_features"))
            s.categorical_features.push_back({c.at("attribute").get<std::string>(),
                                              scope_of(c.at("scope")),
                                              c.at("values").get<std::vector<std::string>>()});
        if (!j.at("outcome").is_null())
            s.outcome = OutcomePredicate::parse(j.at("outcome").get<std::string>());
        if (!std::is_sorted(s.activity_vocabulary.begin(), s.activity_vocabulary.end()))
            throw SchemaMismatch("activity vocabulary must be sorted");
        return s;
    } catch (const json::exception& e) {
        throw SchemaMismatch(std::string("malformed schema: ") + e.what());
    } catch (const UsageError& e) {
        throw SchemaMismatch(std::string("malformed schema: ") + e.what());
    }
}

void write_schema(const FeatureSchema& schema, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << schema_to_json(schema);
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

FeatureSchema read_schema(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return schema_from_json(buffer.str());
}

}  // namespace logsample
