#include "logsample/log_io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "logsample/csv.hpp"
#include "logsample/errors.hpp"

namespace logsample {

namespace csv {

std::optional<std::vector<std::string>> Reader::next() {
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    bool after_quote = false;
    bool any = false;
    record_line_ = line_;
    int ch;
    while ((ch = in_.get()) != std::char_traits<char>::eof()) {
        any = true;
        const char c = static_cast<char>(ch);
        if (in_quotes) {
            if (c == '"') {
                if (in_.peek() == '"') {
                    in_.get();
                    field += '"';
                } else {
                    in_quotes = false;
                    after_quote = true;
                }
            } else {
                if (c == '\n') ++line_;
                field += c;
            }
            continue;
        }
        if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
            after_quote = false;
        } else if (c == '\r' && in_.peek() == '\n') {
            continue;
        } else if (c == '\n') {
            ++line_;
            if (fields.empty() && field.empty() && !after_quote) {
                record_line_ = line_;
                any = false;
                continue;  // blank line
            }
            fields.push_back(std::move(field));
            return fields;
        } else if (c == '"' && field.empty() && !after_quote) {
            in_quotes = true;
        } else if (after_quote) {
            throw ParseError(line_, "unexpected character after closing quote");
        } else {
            field += c;
        }
    }
    if (in_quotes) throw ParseError(record_line_, "unterminated quoted field");
    if (!any) return std::nullopt;
    fields.push_back(std::move(field));
    return fields;
}

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string format_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += escape(fields[i]);
    }
    out += '\n';
    return out;
}

}  // namespace csv

namespace {

std::optional<std::size_t> find_column(const std::vector<std::string>& header,
                                       const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

struct AttributeColumn {
    std::size_t index;
    std::string name;
    AttributeScope scope;
};

}  // namespace

EventLog read_csv(std::istream& in, const CsvColumnMapping& mapping) {
    csv::Reader reader(in);
    auto header_row = reader.next();
    if (!header_row) throw EmptyLog("CSV input is empty");
    const auto& header = *header_row;
    {
        std::set<std::string> seen;
        for (const auto& h : header)
            if (!seen.insert(h).second) throw ParseError(1, "duplicate column '" + h + "'");
    }

    auto required = [&](const std::string& name) {
        auto idx = find_column(header, name);
        if (!idx) throw MappingError("column '" + name + "' not found in header");
        return *idx;
    };
    auto optional_column = [&](const std::optional<std::string>& explicit_name,
                               const std::string& fallback) -> std::optional<std::size_t> {
        if (explicit_name) return required(*explicit_name);
        return find_column(header, fallback);
    };

    {
        std::set<std::string> mandatory{mapping.case_id_column, mapping.activity_column,
                                        mapping.start_time_column};
        if (mandatory.size() != 3) throw MappingError("mandatory column names must be distinct");
    }
    const std::size_t case_col = required(mapping.case_id_column);
    const std::size_t activity_col = required(mapping.activity_column);
    const std::size_t start_col = required(mapping.start_time_column);
    const auto complete_col = optional_column(mapping.complete_time_column, "complete_time");
    const auto event_id_col = optional_column(mapping.event_id_column, "event_id");

    std::vector<AttributeColumn> attribute_columns;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i == case_col || i == activity_col || i == start_col || i == complete_col ||
            i == event_id_col)
            continue;
        AttributeColumn col{i, header[i], AttributeScope::event_level};
        if (col.name.starts_with(kCaseColumnPrefix)) {
            col.name = col.name.substr(kCaseColumnPrefix.size());
            col.scope = AttributeScope::case_level;
        }
        if (auto it = mapping.overrides.find(col.name);
            it != mapping.overrides.end() && it->second.scope)
            col.scope = *it->second.scope;
        if (col.name.empty()) throw MappingError("attribute column with empty name");
        attribute_columns.push_back(std::move(col));
    }

    std::vector<RawEvent> events;
    std::map<std::string, AttributeMap> case_attrs;
    while (auto row = reader.next()) {
        const std::size_t line = reader.line();
        if (row->size() != header.size())
            throw ParseError(line, "expected " + std::to_string(header.size()) + " fields, got " +
                                       std::to_string(row->size()));
        const auto& r = *row;
        RawEvent e;
        e.case_id = r[case_col];
        e.activity = r[activity_col];
        if (e.case_id.empty())
            throw MissingMandatoryField("line " + std::to_string(line) + ": missing case id");
        if (e.activity.empty())
            throw MissingMandatoryField("line " + std::to_string(line) + ": missing activity");
        if (r[start_col].empty())
            throw MissingMandatoryField("line " + std::to_string(line) + ": missing start time");
        e.start_time = parse_timestamp(r[start_col], mapping.timestamp_format);
        if (!e.start_time)
            throw ParseError(line, "unparseable start time '" + r[start_col] + "'");
        if (complete_col && !r[*complete_col].empty()) {
            e.complete_time = parse_timestamp(r[*complete_col], mapping.timestamp_format);
            if (!e.complete_time)
                throw ParseError(line, "unparseable complete time '" + r[*complete_col] + "'");
        }
        if (event_id_col && !r[*event_id_col].empty()) e.event_id = r[*event_id_col];
        for (const auto& col : attribute_columns) {
            const auto& cell = r[col.index];
            if (col.scope == AttributeScope::event_level) {
                e.attributes[col.name] =
                    cell.empty() ? AttributeValue{} : AttributeValue{std::string(cell)};
                continue;
            }
            if (cell.empty()) continue;
            auto& slot = case_attrs[e.case_id][col.name];
            if (is_missing(slot))
                slot = cell;
            else if (std::get<std::string>(slot) != cell)
                throw ParseError(line, "conflicting values for case attribute '" + col.name +
                                           "' of case '" + e.case_id + "'");
        }
        events.push_back(std::move(e));
    }

    BuildOptions options;
    options.overrides = mapping.overrides;
    options.timestamp_format = mapping.timestamp_format;
    return build_event_log(std::move(events), std::move(case_attrs), options);
}

EventLog read_csv(const std::filesystem::path& path, const CsvColumnMapping& mapping) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return read_csv(in, mapping);
}

void write_log_csv(const EventLog& log, std::ostream& out) {
    std::vector<std::string> case_attrs;
    std::vector<std::string> event_attrs;
    for (const auto& [name, spec] : log.schema())
        (spec.scope == AttributeScope::case_level ? case_attrs : event_attrs).push_back(name);

    std::vector<std::string> header{"case_id", "event_id", "activity", "start_time",
                                    "complete_time"};
    for (const auto& n : case_attrs) header.push_back(std::string(kCaseColumnPrefix) + n);
    for (const auto& n : event_attrs) header.push_back(n);
    out << csv::format_row(header);

    std::vector<std::string> row;
    for (const auto& c : log.cases()) {
        for (const auto& e : c.events()) {
            row.clear();
            row.push_back(c.id());
            row.push_back(e.event_id);
            row.push_back(e.activity);
            row.push_back(format_timestamp(e.start_time));
            row.push_back(e.complete_time ? format_timestamp(*e.complete_time) : "");
            for (const auto& n : case_attrs) row.push_back(to_string(c.attribute(n)));
            for (const auto& n : event_attrs) {
                const auto it = e.attributes.find(n);
                row.push_back(it == e.attributes.end() ? "" : to_string(it->second));
            }
            out << csv::format_row(row);
        }
    }
}

void write_log_csv(const EventLog& log, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    write_log_csv(log, out);
    out.flush();
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

SchemaOverrides parse_schema_overrides(std::istream& in) {
    SchemaOverrides result;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        const auto text = trim(raw);
        if (text.empty()) continue;
        const auto eq = text.rfind('=');
        if (eq == std::string::npos) throw ParseError(line, "expected 'name = kind [scope]'");
        const auto name = trim(std::string_view(text).substr(0, eq));
        if (name.empty()) throw ParseError(line, "empty attribute name");
        std::istringstream rest(text.substr(eq + 1));
        std::string kind_text, scope_text, extra;
        rest >> kind_text >> scope_text >> extra;
        if (!extra.empty()) throw ParseError(line, "trailing text '" + extra + "'");
        AttributeOverride o;
        if (!kind_text.empty()) {
            o.kind = parse_attribute_kind(kind_text);
            if (!o.kind) throw ParseError(line, "unknown kind '" + kind_text + "'");
        }
        if (!scope_text.empty()) {
            o.scope = parse_attribute_scope(scope_text);
            if (!o.scope) throw ParseError(line, "unknown scope '" + scope_text + "'");
        }
        result[name] = o;
    }
    return result;
}

SchemaOverrides read_schema_overrides(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return parse_schema_overrides(in);
}

EventLog read_log(const std::filesystem::path& path, const CsvColumnMapping& mapping,
                  Diagnostics* diagnostics) {
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".xes") return read_xes(path, diagnostics, mapping.overrides);
    return read_csv(path, mapping);
}

}  // namespace logsample
