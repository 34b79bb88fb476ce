#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace seg {

struct ConfusionCounts {
    long long tp = 0, fp = 0, fn = 0, tn = 0;
    long long total() const { return tp + fp + fn + tn; }
};

struct MetricsReport {
    double precision = 0, recall = 0, specificity = 0;
    double balanced_accuracy = 0, weighted_f1 = 0;
    bool zero_denominator = false;  // some metric hit a 0/0 and was defined as 0
};

ConfusionCounts confusion(const std::vector<int>& predictions,
                          const std::vector<int>& truths);

MetricsReport metrics(const ConfusionCounts& c);

struct GainCurve {
    // one point per prefix size 0..N: (fraction targeted, fraction captured)
    std::vector<std::pair<double, double>> points;
};

// Sort descending by score (ties by ascending id), then cumulate positives.
GainCurve gain_curve(const std::vector<std::pair<std::int64_t, double>>& scores,
                     const std::unordered_map<std::int64_t, int>& truths);

struct ComparisonRow {
    std::string method;
    MetricsReport report;
};

// One row per named predictor, all evaluated against the same truths.
std::vector<ComparisonRow> compare_table(
    const std::vector<std::pair<std::string, std::vector<int>>>& predictors,
    const std::vector<int>& truths);

// CSV `method,precision,recall,balanced_accuracy,weighted_f1`
void write_comparison_csv(const std::vector<ComparisonRow>& rows, const std::string& path);
// CSV `fraction_targeted,fraction_captured`
void write_gain_curve_csv(const GainCurve& curve, const std::string& path);

}  // namespace seg
