#include <fstream>
#include <set>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "logsample/errors.hpp"
#include "logsample/log_io.hpp"

namespace logsample {

namespace {

namespace pt = boost::property_tree;

const std::set<std::string> kScalarTags{"string", "date", "int", "float", "boolean", "id"};
const std::set<std::string> kKnownExtensions{"concept", "time",     "lifecycle", "org",
                                             "identity", "cost",    "semantic",  "micro"};

void note(Diagnostics* diagnostics, std::string message) {
    if (diagnostics) diagnostics->push_back(std::move(message));
}

struct TypedAttribute {
    std::string key;
    AttributeValue value;
};

/// Converts one XES attribute element; nullopt for unsupported shapes.
std::optional<TypedAttribute> read_attribute(const std::string& tag, const pt::ptree& node,
                                             const std::string& where, Diagnostics* diagnostics) {
    if (!kScalarTags.count(tag)) {
        if (tag == "list" || tag == "container")
            note(diagnostics, where + ": nested '" + tag + "' attribute skipped");
        return std::nullopt;
    }
    const auto key = node.get<std::string>("<xmlattr>.key", "");
    const auto raw = node.get<std::string>("<xmlattr>.value", "");
    if (key.empty()) throw ParseError(0, where + ": attribute without key");
    for (const auto& [child, _] : node)
        if (child != "<xmlattr>") {
            note(diagnostics, where + ": meta-attributes of '" + key + "' ignored");
            break;
        }
    TypedAttribute attr{key, {}};
    if (tag == "date") {
        auto t = parse_iso8601(raw);
        if (!t) throw ParseError(0, where + ": bad date '" + raw + "' for '" + key + "'");
        attr.value = *t;
    } else if (tag == "int" || tag == "float") {
        try {
            std::size_t used = 0;
            const double v = std::stod(raw, &used);
            if (used != raw.size()) throw std::invalid_argument(raw);
            attr.value = v;
        } catch (const std::exception&) {
            throw ParseError(0, where + ": bad number '" + raw + "' for '" + key + "'");
        }
    } else if (tag == "boolean") {
        if (raw != "true" && raw != "false")
            throw ParseError(0, where + ": bad boolean '" + raw + "' for '" + key + "'");
        attr.value = raw == "true";
    } else {
        attr.value = raw;
    }
    return attr;
}

}  // namespace

EventLog read_xes(std::istream& in, Diagnostics* diagnostics, const SchemaOverrides& overrides) {
    pt::ptree tree;
    try {
        pt::read_xml(in, tree);
    } catch (const pt::xml_parser_error& e) {
        throw ParseError(e.line(), e.message());
    }
    const auto log_node = tree.get_child_optional("log");
    if (!log_node) throw ParseError(0, "missing <log> root element");

    std::vector<RawEvent> events;
    std::map<std::string, AttributeMap> case_attrs;
    std::set<std::string> trace_names;
    std::size_t trace_no = 0;

    for (const auto& [tag, node] : *log_node) {
        if (tag == "extension") {
            const auto prefix = node.get<std::string>("<xmlattr>.prefix", "");
            if (!kKnownExtensions.count(prefix))
                note(diagnostics, "extension '" + prefix + "' ingested as plain attributes");
            continue;
        }
        if (tag != "trace") continue;
        ++trace_no;
        const std::string trace_where = "trace " + std::to_string(trace_no);

        std::optional<std::string> name;
        AttributeMap attrs;
        std::vector<const pt::ptree*> event_nodes;
        for (const auto& [child_tag, child] : node) {
            if (child_tag == "event") {
                event_nodes.push_back(&child);
                continue;
            }
            auto attr = read_attribute(child_tag, child, trace_where, diagnostics);
            if (!attr) continue;
            if (attr->key == "concept:name")
                name = to_string(attr->value);
            else
                attrs[attr->key] = std::move(attr->value);
        }
        if (event_nodes.empty()) {
            note(diagnostics, trace_where + (name ? " '" + *name + "'" : std::string()) +
                                  " has no events and was skipped");
            continue;
        }
        if (!name || name->empty()) {
            name = "trace_" + std::to_string(trace_no);
            note(diagnostics, trace_where + " has no concept:name; using '" + *name + "'");
        }
        if (!trace_names.insert(*name).second)
            throw ParseError(0, trace_where + ": duplicate case id '" + *name + "'");

        std::size_t event_no = 0;
        for (const auto* event_node : event_nodes) {
            ++event_no;
            const auto where = trace_where + ", event " + std::to_string(event_no);
            RawEvent e;
            e.case_id = *name;
            for (const auto& [attr_tag, attr_node] : *event_node) {
                auto attr = read_attribute(attr_tag, attr_node, where, diagnostics);
                if (!attr) continue;
                if (attr->key == "concept:name") {
                    e.activity = to_string(attr->value);
                } else if (attr->key == "time:timestamp") {
                    const auto* t = std::get_if<Timestamp>(&attr->value);
                    if (!t) throw ParseError(0, where + ": time:timestamp must be a date");
                    e.start_time = *t;
                } else {
                    e.attributes[attr->key] = std::move(attr->value);
                }
            }
            if (e.activity.empty()) throw ParseError(0, where + ": missing concept:name");
            if (!e.start_time) throw ParseError(0, where + ": missing time:timestamp");
            events.push_back(std::move(e));
        }
        case_attrs[*name] = std::move(attrs);
    }

    BuildOptions options;
    options.overrides = overrides;
    return build_event_log(std::move(events), std::move(case_attrs), options);
}

EventLog read_xes(const std::filesystem::path& path, Diagnostics* diagnostics,
                  const SchemaOverrides& overrides) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return read_xes(in, diagnostics, overrides);
}

}  // namespace logsample
