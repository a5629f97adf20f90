#pragma once

#include <chrono>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace logsample {

struct LabelPair {
    std::string predicted;
    std::string actual;
};

enum class F1Averaging { macro, weighted };

struct ClassificationScores {
    double accuracy = 0;
    double f1 = 0;
};

/// Accuracy and F1 averaged over the classes that occur as a prediction or
/// an actual label. A class whose precision or recall is undefined scores
/// F1 = 0. Throws EmptyInput.
ClassificationScores classification_metrics(std::span<const LabelPair> predictions,
                                            F1Averaging averaging = F1Averaging::macro);

struct RegressionScores {
    double mae = 0;
    double rmse = 0;
};

/// MAE and RMSE of signed errors in seconds. Throws EmptyInput.
RegressionScores regression_metrics(std::span<const double> errors);

/// Quality fields are set only for the task they apply to.
struct AbsoluteMetrics {
    std::optional<double> accuracy;
    std::optional<double> f1;
    std::optional<double> mae_seconds;
    std::optional<double> rmse_seconds;
    double feature_extraction_seconds = 0;
    double training_seconds = 0;
};

/// Sampled-vs-whole ratios oriented so that values above 1 favour sampling:
/// accuracy and F1 put the sampled value on top, errors and times the
/// whole-log value.
struct MetricsReport {
    AbsoluteMetrics baseline;
    AbsoluteMetrics sampled;
    double r_s = 1;
    std::optional<double> r_acc;
    std::optional<double> r_f1;
    std::optional<double> r_mae;
    std::optional<double> r_rmse;
    double r_fe = 1;
    double r_t = 1;
};

/// Throws ZeroDenominator naming the offending field.
MetricsReport relative_report(const AbsoluteMetrics& baseline, const AbsoluteMetrics& sampled,
                              double r_s);

/// Wall-clock seconds spent in `fn`.
template <class Fn>
double time_seconds(Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(stop - start).count();
}

}  // namespace logsample
