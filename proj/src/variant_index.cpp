#include "logsample/variant_index.hpp"

#include <algorithm>
#include <ostream>

#include "logsample/csv.hpp"
#include "logsample/errors.hpp"
#include "number_format.hpp"

namespace logsample {

std::string VariantGroup::modal_value(const std::string& attribute) const {
    const auto it = categorical_summaries.find(attribute);
    if (it == categorical_summaries.end() || it->second.empty()) return {};
    // std::map iterates values ascending, so the first maximum wins ties.
    const auto best = std::max_element(
        it->second.begin(), it->second.end(),
        [](const auto& a, const auto& b) { return a.second < b.second; });
    return best->first;
}

std::optional<double> case_numeric_value(const Case& c, const std::string& attribute,
                                         AttributeScope scope) {
    if (scope == AttributeScope::case_level) return numeric_value(c.attribute(attribute));
    double sum = 0;
    std::size_t n = 0;
    for (const auto& e : c.events()) {
        const auto it = e.attributes.find(attribute);
        if (it == e.attributes.end()) continue;
        if (auto v = numeric_value(it->second)) {
            sum += *v;
            ++n;
        }
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

namespace {

NumericSummary summarize(std::vector<double> values) {
    NumericSummary s;
    s.count = values.size();
    double sum = 0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    std::sort(values.begin(), values.end());
    const auto mid = values.size() / 2;
    s.median = values.size() % 2 ? values[mid] : (values[mid - 1] + values[mid]) / 2.0;
    return s;
}

}  // namespace

VariantIndex build_index(const EventLog& log, const std::set<std::string>& attributes) {
    for (const auto& a : attributes)
        if (!log.schema().count(a)) throw UnknownAttribute(a);

    std::map<Variant, std::vector<std::size_t>> by_variant;
    const auto cases = log.cases();
    for (std::size_t i = 0; i < cases.size(); ++i) by_variant[cases[i].variant()].push_back(i);

    VariantIndex index;
    index.source_case_count = cases.size();
    index.attributes = attributes;
    index.groups.reserve(by_variant.size());
    for (auto& [variant, members] : by_variant) {
        VariantGroup g;
        g.variant = variant;
        g.case_indices = std::move(members);
        for (auto i : g.case_indices) g.case_ids.push_back(cases[i].id());

        for (const auto& name : attributes) {
            const auto spec = log.schema().at(name);
            if (spec.kind == AttributeKind::categorical) {
                auto& counts = g.categorical_summaries[name];
                for (auto i : g.case_indices) {
                    const auto& c = cases[i];
                    if (spec.scope == AttributeScope::case_level) {
                        if (const auto& v = c.attribute(name); !is_missing(v)) ++counts[to_string(v)];
                        continue;
                    }
                    for (const auto& e : c.events())
                        if (auto it = e.attributes.find(name);
                            it != e.attributes.end() && !is_missing(it->second))
                            ++counts[to_string(it->second)];
                }
                if (counts.empty()) g.categorical_summaries.erase(name);
            } else {
                std::vector<double> values;
                for (auto i : g.case_indices)
                    if (auto v = case_numeric_value(cases[i], name, spec.scope)) values.push_back(*v);
                if (!values.empty()) g.numeric_summaries[name] = summarize(std::move(values));
            }
        }
        index.groups.push_back(std::move(g));
    }
    // by_variant iterates variants ascending, so a stable sort on frequency
    // leaves equal-frequency groups in lexicographic variant order.
    std::stable_sort(index.groups.begin(), index.groups.end(),
                     [](const VariantGroup& a, const VariantGroup& b) {
                         return a.frequency() > b.frequency();
                     });
    return index;
}

void write_index_csv(const VariantIndex& index, const EventLog& log, std::ostream& out) {
    std::vector<std::string> header{"variant", "frequency"};
    for (const auto& a : index.attributes) {
        if (log.schema().at(a).kind == AttributeKind::categorical) {
            header.push_back(a + ":mode");
            header.push_back(a + ":distinct");
        } else {
            header.push_back(a + ":mean");
            header.push_back(a + ":median");
            header.push_back(a + ":count");
        }
    }
    out << csv::format_row(header);
    for (const auto& g : index.groups) {
        std::vector<std::string> row{variant_to_string(g.variant), std::to_string(g.frequency())};
        for (const auto& a : index.attributes) {
            if (log.schema().at(a).kind == AttributeKind::categorical) {
                const auto it = g.categorical_summaries.find(a);
                row.push_back(g.modal_value(a));
                row.push_back(
                    std::to_string(it == g.categorical_summaries.end() ? 0 : it->second.size()));
            } else if (auto it = g.numeric_summaries.find(a); it != g.numeric_summaries.end()) {
                row.push_back(detail::format_number(it->second.mean));
                row.push_back(detail::format_number(it->second.median));
                row.push_back(std::to_string(it->second.count));
            } else {
                row.insert(row.end(), {"", "", "0"});
            }
        }
        out << csv::format_row(row);
    }
}

}  // namespace logsample
