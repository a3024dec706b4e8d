#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace stripscreen::metrics {

struct ConfusionMatrix {
    std::int64_t tp = 0;
    std::int64_t tn = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;

    std::int64_t total() const { return tp + tn + fp + fn; }
};

// Standard 2x2 cross-tabulation; positive = COVID-positive (label 1).
ConfusionMatrix confusion(std::span<const int> predictions, std::span<const int> labels);

// Metrics with a zero denominator are reported as nullopt, never coerced
// to 0.
struct MetricSet {
    std::optional<double> accuracy;
    std::optional<double> precision;
    std::optional<double> sensitivity;  // recall
    std::optional<double> specificity;
};

MetricSet metric_set(const ConfusionMatrix& cm);

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

struct RocCurve {
    std::vector<RocPoint> points;  // (0,0) .. (1,1), monotone
    double auc = 0.0;              // trapezoidal
};

// Threshold sweep over distinct score values descending with ties grouped;
// trapezoidal AUC equals the tie-corrected Mann-Whitney statistic.
RocCurve roc_curve(std::span<const double> scores, std::span<const int> labels);

std::string roc_csv(const RocCurve& roc);
// Standalone plot with the y=x reference line.
std::string roc_svg(const RocCurve& roc, const std::string& score_label);

}  // namespace stripscreen::metrics
