#include "logsample/sampler.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <numeric>
#include <random>

#include "logsample/errors.hpp"

namespace logsample {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::uint64_t parse_unsigned(std::string_view text, std::string_view what) {
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
        throw UsageError("invalid " + std::string(what) + " '" + std::string(text) + "'");
    return value;
}

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        out.emplace_back(text.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::uint64_t fnv1a(const Variant& variant) {
    std::uint64_t h = 1469598103934665603ull;
    for (const auto& a : variant) {
        for (unsigned char c : a) {
            h ^= c;
            h *= 1099511628211ull;
        }
        h ^= 0xff;
        h *= 1099511628211ull;
    }
    return h;
}

/// Sorts positions by key, ties by position (= case id order).
template <class Key>
void order_by(std::vector<std::size_t>& positions, const std::vector<Key>& keys) {
    std::vector<std::size_t> slot(positions.size());
    std::iota(slot.begin(), slot.end(), 0);
    std::sort(slot.begin(), slot.end(), [&](std::size_t a, std::size_t b) {
        if (keys[a] != keys[b]) return keys[a] < keys[b];
        return positions[a] < positions[b];
    });
    std::vector<std::size_t> sorted;
    sorted.reserve(positions.size());
    for (auto s : slot) sorted.push_back(positions[s]);
    positions = std::move(sorted);
}

const AttributeSpec& spec_of(const EventLog& log, const std::string& name) {
    const auto it = log.schema().find(name);
    if (it == log.schema().end()) throw UnknownAttribute(name);
    return it->second;
}

}  // namespace

SelectionStrategy parse_selection(std::string_view text, std::uint64_t seed) {
    if (text == "unique") return UniqueSelection{};
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) throw UsageError("unknown strategy '" + std::string(text) + "'");
    const auto head = text.substr(0, colon);
    const auto arg = text.substr(colon + 1);
    auto k_value = [&] {
        const auto k = parse_unsigned(arg, "k");
        if (k < 2) throw UsageError("k must be an integer >= 2, got " + std::string(arg));
        if (k > std::numeric_limits<std::uint32_t>::max()) throw UsageError("k too large");
        return static_cast<std::uint32_t>(k);
    };
    if (head == "log") return LogarithmicSelection{k_value()};
    if (head == "div") return DivisionSelection{k_value()};
    if (head == "rand") {
        const auto n = parse_unsigned(arg, "n");
        if (n < 1) throw UsageError("n must be >= 1");
        return RandomTotalSelection{static_cast<std::size_t>(n), seed};
    }
    throw UsageError("unknown strategy '" + std::string(text) + "'");
}

SortStrategy parse_sort(std::string_view text, std::uint64_t seed) {
    if (text == "random") return RandomSort{seed};
    if (text == "arrival:newest") return ArrivalSort{true};
    if (text == "arrival:oldest") return ArrivalSort{false};
    if (text.starts_with("centroid:")) {
        auto parts = split(text.substr(9), ':');
        NumericCentroidSort s;
        if (parts.size() > 2 || parts[0].empty())
            throw UsageError("expected centroid:ATTR[:mean|:median]");
        s.attribute = parts[0];
        if (parts.size() == 2) {
            if (parts[1] == "median")
                s.statistic = CentroidStatistic::median;
            else if (parts[1] != "mean")
                throw UsageError("unknown centroid statistic '" + parts[1] + "'");
        }
        return s;
    }
    if (text.starts_with("mode:")) {
        ModeAffinitySort s{split(text.substr(5), ',')};
        for (const auto& a : s.attributes)
            if (a.empty()) throw UsageError("empty attribute in mode sort");
        return s;
    }
    throw UsageError("unknown sort '" + std::string(text) + "'");
}

std::string describe(const SelectionStrategy& select) {
    return std::visit(overloaded{
                          [](const UniqueSelection&) -> std::string { return "unique"; },
                          [](const LogarithmicSelection& s) { return "log" + std::to_string(s.base); },
                          [](const DivisionSelection& s) { return "d" + std::to_string(s.divisor); },
                          [](const RandomTotalSelection& s) { return "rand" + std::to_string(s.count); },
                      },
                      select);
}

std::string describe(const SortStrategy& sort) {
    return std::visit(
        overloaded{
            [](const NumericCentroidSort& s) {
                return "centroid:" + s.attribute +
                       (s.statistic == CentroidStatistic::median ? ":median" : "");
            },
            [](const ModeAffinitySort& s) {
                std::string out = "mode:";
                for (std::size_t i = 0; i < s.attributes.size(); ++i)
                    out += (i ? "," : "") + s.attributes[i];
                return out;
            },
            [](const ArrivalSort& s) -> std::string {
                return s.newest_first ? "arrival:newest" : "arrival:oldest";
            },
            [](const RandomSort&) -> std::string { return "random"; },
        },
        sort);
}

std::set<std::string> required_attributes(const SortStrategy& sort) {
    if (const auto* c = std::get_if<NumericCentroidSort>(&sort)) return {c->attribute};
    if (const auto* m = std::get_if<ModeAffinitySort>(&sort))
        return {m->attributes.begin(), m->attributes.end()};
    return {};
}

std::set<std::string> index_attributes(const SamplingPlan& plan) {
    auto attrs = required_attributes(plan.sort);
    attrs.insert(plan.attributes.begin(), plan.attributes.end());
    return attrs;
}

void validate(const SamplingPlan& plan, const AttributeSchema& schema) {
    std::visit(overloaded{
                   [](const UniqueSelection&) {},
                   [](const LogarithmicSelection& s) {
                       if (s.base < 2) throw UsageError("logarithm base must be >= 2");
                   },
                   [](const DivisionSelection& s) {
                       if (s.divisor < 2) throw UsageError("divisor must be >= 2");
                   },
                   [](const RandomTotalSelection& s) {
                       if (s.count < 1) throw UsageError("random sample size must be >= 1");
                   },
               },
               plan.select);
    for (const auto& a : index_attributes(plan))
        if (!schema.count(a)) throw UnknownAttribute(a);
    if (const auto* c = std::get_if<NumericCentroidSort>(&plan.sort)) {
        if (schema.at(c->attribute).kind == AttributeKind::categorical)
            throw WrongAttributeKind("centroid sort needs a numeric attribute, '" + c->attribute +
                                     "' is categorical");
    }
    if (const auto* m = std::get_if<ModeAffinitySort>(&plan.sort)) {
        for (const auto& a : m->attributes)
            if (schema.at(a).kind != AttributeKind::categorical)
                throw WrongAttributeKind("mode sort needs categorical attributes, '" + a +
                                         "' is not");
    }
}

std::vector<std::size_t> prioritize_indices(const VariantGroup& group, const EventLog& log,
                                            const SortStrategy& sort) {
    std::vector<std::size_t> positions = group.case_indices;
    const auto cases = log.cases();

    std::visit(
        overloaded{
            [&](const NumericCentroidSort& s) {
                const auto& spec = spec_of(log, s.attribute);
                if (spec.kind == AttributeKind::categorical)
                    throw WrongAttributeKind("'" + s.attribute + "' is categorical");
                const auto summary = group.numeric_summaries.find(s.attribute);
                if (summary == group.numeric_summaries.end()) return;  // all equal priority
                const double centroid = s.statistic == CentroidStatistic::mean
                                            ? summary->second.mean
                                            : summary->second.median;
                std::vector<double> keys;
                keys.reserve(positions.size());
                for (auto p : positions) {
                    const auto v = case_numeric_value(cases[p], s.attribute, spec.scope);
                    keys.push_back(v ? std::abs(*v - centroid)
                                     : std::numeric_limits<double>::infinity());
                }
                order_by(positions, keys);
            },
            [&](const ModeAffinitySort& s) {
                std::vector<long long> keys(positions.size(), 0);
                for (const auto& a : s.attributes) {
                    const auto& spec = spec_of(log, a);
                    if (spec.kind != AttributeKind::categorical)
                        throw WrongAttributeKind("'" + a + "' is not categorical");
                    const auto modal = group.modal_value(a);
                    if (modal.empty()) continue;
                    for (std::size_t i = 0; i < positions.size(); ++i) {
                        const auto& c = cases[positions[i]];
                        if (spec.scope == AttributeScope::case_level) {
                            const auto& v = c.attribute(a);
                            if (!is_missing(v) && to_string(v) == modal) --keys[i];
                            continue;
                        }
                        for (const auto& e : c.events())
                            if (auto it = e.attributes.find(a);
                                it != e.attributes.end() && to_string(it->second) == modal)
                                --keys[i];
                    }
                }
                order_by(positions, keys);
            },
            [&](const ArrivalSort& s) {
                std::vector<long long> keys;
                keys.reserve(positions.size());
                for (auto p : positions) {
                    const auto t = cases[p].first_start().time_since_epoch().count();
                    keys.push_back(s.newest_first ? -t : t);
                }
                order_by(positions, keys);
            },
            [&](const RandomSort& s) {
                std::mt19937_64 rng(s.seed ^ fnv1a(group.variant));
                std::vector<std::uint64_t> keys;
                keys.reserve(positions.size());
                for (std::size_t i = 0; i < positions.size(); ++i) keys.push_back(rng());
                order_by(positions, keys);
            },
        },
        sort);
    return positions;
}

std::vector<std::string> prioritize(const VariantGroup& group, const EventLog& log,
                                    const SortStrategy& sort) {
    std::vector<std::string> ids;
    for (auto p : prioritize_indices(group, log, sort)) ids.push_back(log.cases()[p].id());
    return ids;
}

std::size_t quota(std::size_t frequency, const SelectionStrategy& select) {
    const std::size_t q = std::visit(
        overloaded{
            [](const UniqueSelection&) -> std::size_t { return 1; },
            [&](const DivisionSelection& s) -> std::size_t {
                return (frequency + s.divisor - 1) / s.divisor;
            },
            [&](const LogarithmicSelection& s) -> std::size_t {
                // Smallest e with base^e >= frequency, i.e. ceil(log_base(frequency)).
                std::size_t e = 0;
                std::size_t power = 1;
                while (power < frequency) {
                    if (power > std::numeric_limits<std::size_t>::max() / s.base) return e + 1;
                    power *= s.base;
                    ++e;
                }
                return e;
            },
            [&](const RandomTotalSelection&) -> std::size_t { return frequency; },
        },
        select);
    return std::min(q, frequency);
}

EventLog sample(const EventLog& log, const VariantIndex& index, const SamplingPlan& plan) {
    validate(plan, log.schema());
    for (const auto& a : required_attributes(plan.sort))
        if (!index.attributes.count(a)) throw UnknownAttribute(a);

    std::vector<std::size_t> kept;
    if (const auto* r = std::get_if<RandomTotalSelection>(&plan.select)) {
        std::mt19937_64 rng(r->seed);
        std::vector<std::size_t> positions(log.case_count());
        std::iota(positions.begin(), positions.end(), 0);
        std::vector<std::uint64_t> keys;
        keys.reserve(positions.size());
        for (std::size_t i = 0; i < positions.size(); ++i) keys.push_back(rng());
        order_by(positions, keys);
        positions.resize(std::min(r->count, positions.size()));
        kept = std::move(positions);
    } else {
        for (const auto& group : index.groups) {
            const auto q = quota(group.frequency(), plan.select);
            if (q == 0) continue;
            auto ordered = prioritize_indices(group, log, plan.sort);
            kept.insert(kept.end(), ordered.begin(), ordered.begin() + static_cast<long>(q));
        }
    }
    if (kept.empty()) throw EmptySample("sampling plan " + describe(plan.select) + " selected no cases");
    return log.subset(kept);
}

EventLog sample(const EventLog& log, const SamplingPlan& plan) {
    validate(plan, log.schema());
    return sample(log, build_index(log, index_attributes(plan)), plan);
}

double size_reduction(const EventLog& original, const EventLog& sampled) {
    if (sampled.case_count() == 0) throw EmptySample("sampled log is empty");
    return static_cast<double>(original.case_count()) / static_cast<double>(sampled.case_count());
}

}  // namespace logsample
