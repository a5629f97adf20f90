#include "logsample/metrics.hpp"

#include <cmath>
#include <map>

#include "logsample/errors.hpp"

namespace logsample {

ClassificationScores classification_metrics(std::span<const LabelPair> predictions,
                                            F1Averaging averaging) {
    if (predictions.empty()) throw EmptyInput("no predictions");

    struct Counts {
        std::size_t tp = 0, fp = 0, fn = 0;
    };
    std::map<std::string, Counts> per_class;
    std::size_t correct = 0;
    for (const auto& p : predictions) {
        if (p.predicted == p.actual) {
            ++correct;
            ++per_class[p.actual].tp;
        } else {
            ++per_class[p.predicted].fp;
            ++per_class[p.actual].fn;
        }
    }

    double weighted_sum = 0;
    double weight_total = 0;
    for (const auto& [label, c] : per_class) {
        double f1 = 0;
        if (c.tp > 0) {
            const double precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
            const double recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
            f1 = 2 * precision * recall / (precision + recall);
        }
        const double weight =
            averaging == F1Averaging::macro ? 1.0 : static_cast<double>(c.tp + c.fn);
        weighted_sum += weight * f1;
        weight_total += weight;
    }

    ClassificationScores scores;
    scores.accuracy = static_cast<double>(correct) / static_cast<double>(predictions.size());
    scores.f1 = weight_total > 0 ? weighted_sum / weight_total : 0.0;
    return scores;
}

RegressionScores regression_metrics(std::span<const double> errors) {
    if (errors.empty()) throw EmptyInput("no errors");
    double abs_sum = 0;
    double sq_sum = 0;
    for (double e : errors) {
        abs_sum += std::abs(e);
        sq_sum += e * e;
    }
    const auto n = static_cast<double>(errors.size());
    return {abs_sum / n, std::sqrt(sq_sum / n)};
}

namespace {

std::optional<double> ratio(const std::optional<double>& top, const std::optional<double>& bottom,
                            const char* field) {
    if (!top || !bottom) return std::nullopt;
    if (*bottom == 0) throw ZeroDenominator(field);
    return *top / *bottom;
}

}  // namespace

MetricsReport relative_report(const AbsoluteMetrics& baseline, const AbsoluteMetrics& sampled,
                              double r_s) {
    MetricsReport report;
    report.baseline = baseline;
    report.sampled = sampled;
    report.r_s = r_s;
    report.r_acc = ratio(sampled.accuracy, baseline.accuracy, "baseline.accuracy");
    report.r_f1 = ratio(sampled.f1, baseline.f1, "baseline.f1");
    report.r_mae = ratio(baseline.mae_seconds, sampled.mae_seconds, "sampled.mae_seconds");
    report.r_rmse = ratio(baseline.rmse_seconds, sampled.rmse_seconds, "sampled.rmse_seconds");
    report.r_fe = *ratio(baseline.feature_extraction_seconds, sampled.feature_extraction_seconds,
                         "sampled.feature_extraction_seconds");
    report.r_t = *ratio(baseline.training_seconds, sampled.training_seconds,
                        "sampled.training_seconds");
    return report;
}

}  // namespace logsample
