#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>

#include "logsample/event_log.hpp"

namespace logsample {

/// Case-level k-fold assignment shared by every sampling configuration.
struct FoldAssignment {
    std::size_t fold_count = 0;
    std::uint64_t seed = 0;
    std::map<std::string, std::size_t> assignment;  // case id -> fold

    std::size_t fold_size(std::size_t fold) const;
};

/// Seeded shuffle of case ids, then round-robin. Throws TooFewCases when the
/// log has fewer cases than folds and UsageError when fold_count < 2.
FoldAssignment assign_folds(const EventLog& log, std::size_t fold_count, std::uint64_t seed);

struct FoldSplit {
    EventLog train;
    EventLog test;
};

/// Test log = cases of `test_fold`, train log = the rest. Throws UsageError
/// for an out-of-range fold and InvariantViolation when the assignment does
/// not cover the log.
FoldSplit materialize_fold(const EventLog& log, const FoldAssignment& assignment,
                           std::size_t test_fold);

/// CSV with header `case_id,fold`, rows by case id.
void write_folds_csv(const FoldAssignment& folds, const std::filesystem::path& path);
void write_folds_csv(const FoldAssignment& folds, std::ostream& out);
/// Seed is not stored in the file and reads back as 0.
FoldAssignment read_folds_csv(const std::filesystem::path& path);
FoldAssignment read_folds_csv(std::istream& in);

}  // namespace logsample
