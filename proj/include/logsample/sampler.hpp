#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "logsample/event_log.hpp"
#include "logsample/variant_index.hpp"

namespace logsample {

// Sorting strategies: which cases of a variant group are kept first.

enum class CentroidStatistic { mean, median };

/// Ascending distance between the case value and the group mean/median.
struct NumericCentroidSort {
    std::string attribute;
    CentroidStatistic statistic = CentroidStatistic::mean;
};

/// Descending number of attribute values equal to the group's modal value.
struct ModeAffinitySort {
    std::vector<std::string> attributes;
};

/// By first event start.
struct ArrivalSort {
    bool newest_first = false;
};

struct RandomSort {
    std::uint64_t seed = 0;
};

using SortStrategy = std::variant<NumericCentroidSort, ModeAffinitySort, ArrivalSort, RandomSort>;

// Selection strategies: how many cases of each group are kept.

struct UniqueSelection {};

/// ceil(log_base(frequency)) per group; frequency-1 variants vanish.
struct LogarithmicSelection {
    std::uint32_t base = 2;
};

/// ceil(frequency / divisor) per group.
struct DivisionSelection {
    std::uint32_t divisor = 2;
};

/// `count` cases drawn from the whole log without replacement.
struct RandomTotalSelection {
    std::size_t count = 1;
    std::uint64_t seed = 0;
};

using SelectionStrategy =
    std::variant<UniqueSelection, LogarithmicSelection, DivisionSelection, RandomTotalSelection>;

struct SamplingPlan {
    SortStrategy sort = ArrivalSort{};
    SelectionStrategy select = UniqueSelection{};
    /// Extra attributes summarized per variant besides those the sort needs.
    std::set<std::string> attributes;
};

/// Parses `unique`, `log:K`, `div:K` or `rand:N`. Throws UsageError.
SelectionStrategy parse_selection(std::string_view text, std::uint64_t seed = 0);

/// Parses `centroid:ATTR[:mean|:median]`, `mode:A,B,...`, `arrival:newest`,
/// `arrival:oldest` or `random`. Throws UsageError.
SortStrategy parse_sort(std::string_view text, std::uint64_t seed = 0);

/// Short label: `unique`, `log3`, `d4`, `rand100`.
std::string describe(const SelectionStrategy& select);
std::string describe(const SortStrategy& sort);

/// Attributes the sort reads; they must be summarized in the index.
std::set<std::string> required_attributes(const SortStrategy& sort);

/// required_attributes(plan.sort) together with plan.attributes.
std::set<std::string> index_attributes(const SamplingPlan& plan);

/// Throws UsageError on k < 2 or n < 1, UnknownAttribute, WrongAttributeKind.
void validate(const SamplingPlan& plan, const AttributeSchema& schema);

/// Total priority order over the group's cases (highest priority first). Ties
/// resolve by case id.
std::vector<std::string> prioritize(const VariantGroup& group, const EventLog& log,
                                    const SortStrategy& sort);

/// Log positions of the group's cases in priority order.
std::vector<std::size_t> prioritize_indices(const VariantGroup& group, const EventLog& log,
                                            const SortStrategy& sort);

/// Cases kept for a group of `frequency` cases, capped at `frequency`.
/// RandomTotalSelection has no per-group quota and yields `frequency`.
std::size_t quota(std::size_t frequency, const SelectionStrategy& select);

/// Sub-log of the top-priority cases per group. Throws EmptySample when
/// nothing is selected and UnknownAttribute when the index lacks an
/// attribute the sort needs.
EventLog sample(const EventLog& log, const VariantIndex& index, const SamplingPlan& plan);

/// Builds the index from `plan` and samples.
EventLog sample(const EventLog& log, const SamplingPlan& plan);

/// Case count of `original` over case count of `sampled`.
double size_reduction(const EventLog& original, const EventLog& sampled);

}  // namespace logsample
