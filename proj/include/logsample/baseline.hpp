#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "logsample/features.hpp"
#include "logsample/metrics.hpp"

namespace logsample {

/// Token sequence a prediction is conditioned on.
using Context = std::vector<std::string>;

/// Label counts per context with backoff to shorter contexts and finally to
/// the global majority. Next-activity models condition on the last
/// `order - 1` activities; outcome models first try the whole-prefix
/// signature (window plus activity counts).
class NgramModel {
public:
    NgramModel(FeatureSchema schema, std::size_t order);

    const FeatureSchema& schema() const noexcept { return schema_; }
    std::size_t order() const noexcept { return order_; }
    const std::map<Context, std::map<std::string, std::size_t>>& counts() const noexcept {
        return counts_;
    }

    /// Contexts of one encoded row, longest first, ending with the empty one.
    std::vector<Context> contexts(std::span<const double> features) const;

    void add(std::span<const double> features, const std::string& label);
    /// Raw count insertion, used when loading a serialized model.
    void add_count(Context context, std::string label, std::size_t count);

    /// Majority label of the longest known context; ties go to the smallest
    /// label. Returns "" only for an untrained model.
    std::string predict(std::span<const double> features) const;

private:
    FeatureSchema schema_;
    std::size_t order_;
    std::map<Context, std::map<std::string, std::size_t>> counts_;
};

/// Mean remaining seconds per (last activity, prefix-length bucket).
class PrefixStatModel {
public:
    explicit PrefixStatModel(FeatureSchema schema);

    /// Prefix lengths 1..15 have their own bucket, longer prefixes share one.
    static std::size_t bucket(std::size_t prefix_length);

    const FeatureSchema& schema() const noexcept { return schema_; }

    void add(const std::string& last_activity, std::size_t prefix_length, double seconds);
    void set_bucket(const std::string& last_activity, std::size_t bucket, double mean,
                    std::size_t count);
    void set_global(double mean, std::size_t count);

    double predict(const std::string& last_activity, std::size_t prefix_length) const;

    struct Accumulator {
        double sum = 0;
        std::size_t count = 0;
        double mean() const { return count ? sum / static_cast<double>(count) : 0.0; }
    };
    const std::map<std::pair<std::string, std::size_t>, Accumulator>& buckets() const noexcept {
        return buckets_;
    }
    const Accumulator& global() const noexcept { return global_; }

private:
    FeatureSchema schema_;
    std::map<std::pair<std::string, std::size_t>, Accumulator> buckets_;
    Accumulator global_;
};

using BaselineModel = std::variant<NgramModel, PrefixStatModel>;

inline constexpr std::size_t kDefaultNgramOrder = 3;

/// Throws TaskMismatch unless the table's task is next_activity.
NgramModel train_next_activity(const FeatureTable& table, std::size_t order = kDefaultNgramOrder);
/// Throws TaskMismatch unless the table's task is outcome.
NgramModel train_outcome(const FeatureTable& table, std::size_t order = kDefaultNgramOrder);
/// Throws TaskMismatch unless the table's task is remaining_time.
PrefixStatModel train_remaining_time(const FeatureTable& table);

/// Picks the trainer matching the table's task.
BaselineModel train_baseline(const FeatureTable& table, std::size_t order = kDefaultNgramOrder);

/// Predictions for one row of `table`. Throw SchemaMismatch when the table
/// was built with a different schema than the model.
std::string predict(const NgramModel& model, const FeatureTable& table, std::size_t row);
double predict(const PrefixStatModel& model, const FeatureTable& table, std::size_t row);

/// Quality fields of AbsoluteMetrics for the model on `table`.
AbsoluteMetrics evaluate(const BaselineModel& model, const FeatureTable& table,
                         F1Averaging averaging = F1Averaging::macro);

/// Flat text: a header line, then one tab-separated line per
/// (context, label, count) or (activity, bucket, mean, count).
void write_model(const BaselineModel& model, std::ostream& out);
void write_model(const BaselineModel& model, const std::filesystem::path& path);
BaselineModel read_model(std::istream& in, const FeatureSchema& schema);
BaselineModel read_model(const std::filesystem::path& path, const FeatureSchema& schema);

}  // namespace logsample
