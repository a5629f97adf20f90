#include "logsample/splitter.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <random>

#include "logsample/csv.hpp"
#include "logsample/errors.hpp"

namespace logsample {

std::size_t FoldAssignment::fold_size(std::size_t fold) const {
    return static_cast<std::size_t>(std::count_if(
        assignment.begin(), assignment.end(), [&](const auto& kv) { return kv.second == fold; }));
}

FoldAssignment assign_folds(const EventLog& log, std::size_t fold_count, std::uint64_t seed) {
    if (fold_count < 2) throw UsageError("fold count must be >= 2");
    if (log.case_count() < fold_count)
        throw TooFewCases("log has " + std::to_string(log.case_count()) + " cases, need at least " +
                          std::to_string(fold_count));

    const auto cases = log.cases();
    std::mt19937_64 rng(seed);
    std::vector<std::pair<std::uint64_t, std::size_t>> keyed;
    keyed.reserve(cases.size());
    for (std::size_t i = 0; i < cases.size(); ++i) keyed.emplace_back(rng(), i);
    std::sort(keyed.begin(), keyed.end());

    FoldAssignment folds;
    folds.fold_count = fold_count;
    folds.seed = seed;
    for (std::size_t pos = 0; pos < keyed.size(); ++pos)
        folds.assignment[cases[keyed[pos].second].id()] = pos % fold_count;
    return folds;
}

FoldSplit materialize_fold(const EventLog& log, const FoldAssignment& assignment,
                           std::size_t test_fold) {
    if (test_fold >= assignment.fold_count)
        throw UsageError("test fold " + std::to_string(test_fold) + " out of range");
    std::vector<std::size_t> train, test;
    const auto cases = log.cases();
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto it = assignment.assignment.find(cases[i].id());
        if (it == assignment.assignment.end())
            throw InvariantViolation("case '" + cases[i].id() + "' has no fold");
        (it->second == test_fold ? test : train).push_back(i);
    }
    return FoldSplit{log.subset(train), log.subset(test)};
}

void write_folds_csv(const FoldAssignment& folds, std::ostream& out) {
    out << "case_id,fold\n";
    for (const auto& [id, fold] : folds.assignment)
        out << csv::escape(id) << ',' << fold << '\n';
}

void write_folds_csv(const FoldAssignment& folds, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    write_folds_csv(folds, out);
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

FoldAssignment read_folds_csv(std::istream& in) {
    csv::Reader reader(in);
    const auto header = reader.next();
    if (!header || *header != std::vector<std::string>{"case_id", "fold"})
        throw ParseError(1, "expected header 'case_id,fold'");
    FoldAssignment folds;
    while (auto row = reader.next()) {
        if (row->size() != 2) throw ParseError(reader.line(), "expected 2 fields");
        std::size_t fold = 0;
        const auto& f = (*row)[1];
        const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), fold);
        if (f.empty() || ec != std::errc{} || ptr != f.data() + f.size())
            throw ParseError(reader.line(), "bad fold index '" + f + "'");
        if (!folds.assignment.emplace((*row)[0], fold).second)
            throw ParseError(reader.line(), "duplicate case '" + (*row)[0] + "'");
        folds.fold_count = std::max(folds.fold_count, fold + 1);
    }
    if (folds.assignment.empty()) throw EmptyInput("fold file has no rows");
    return folds;
}

FoldAssignment read_folds_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return read_folds_csv(in);
}

}  // namespace logsample
