#include "segpipe/evaluate.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "segpipe/io.hpp"

namespace seg {

ConfusionCounts confusion(const std::vector<int>& predictions,
                          const std::vector<int>& truths) {
    if (predictions.empty() || predictions.size() != truths.size())
        throw std::invalid_argument("confusion: lengths must match and be nonzero");
    ConfusionCounts c;
    for (size_t i = 0; i < predictions.size(); ++i) {
        if (predictions[i]) {
            truths[i] ? ++c.tp : ++c.fp;
        } else {
            truths[i] ? ++c.fn : ++c.tn;
        }
    }
    return c;
}

namespace {
double ratio(long long num, long long den, bool& degenerate) {
    if (den == 0) {
        degenerate = true;
        return 0.0;
    }
    return static_cast<double>(num) / den;
}
}  // namespace

MetricsReport metrics(const ConfusionCounts& c) {
    if (c.total() < 1) throw std::invalid_argument("metrics: empty counts");
    MetricsReport r;
    r.precision = ratio(c.tp, c.tp + c.fp, r.zero_denominator);
    r.recall = ratio(c.tp, c.tp + c.fn, r.zero_denominator);
    r.specificity = ratio(c.tn, c.tn + c.fp, r.zero_denominator);
    r.balanced_accuracy = (r.recall + r.specificity) / 2.0;

    // per-class F1 with that class as positive, support-weighted
    const long long n_pos = c.tp + c.fn;
    const long long n_neg = c.tn + c.fp;
    bool deg_pos = false, deg_neg = false;
    const double prec_pos = ratio(c.tp, c.tp + c.fp, deg_pos);
    const double rec_pos = ratio(c.tp, c.tp + c.fn, deg_pos);
    const double prec_neg = ratio(c.tn, c.tn + c.fn, deg_neg);
    const double rec_neg = ratio(c.tn, c.tn + c.fp, deg_neg);
    const double f1_pos =
        (prec_pos + rec_pos > 0) ? 2 * prec_pos * rec_pos / (prec_pos + rec_pos) : 0.0;
    const double f1_neg =
        (prec_neg + rec_neg > 0) ? 2 * prec_neg * rec_neg / (prec_neg + rec_neg) : 0.0;
    r.weighted_f1 = (n_pos * f1_pos + n_neg * f1_neg) / static_cast<double>(c.total());
    r.zero_denominator = r.zero_denominator || deg_pos || deg_neg;
    return r;
}

GainCurve gain_curve(const std::vector<std::pair<std::int64_t, double>>& scores,
                     const std::unordered_map<std::int64_t, int>& truths) {
    if (scores.empty()) throw std::invalid_argument("gain_curve: empty scores");
    long long total_pos = 0;
    for (const auto& [id, score] : scores) {
        auto it = truths.find(id);
        if (it == truths.end())
            throw std::invalid_argument("gain_curve: missing truth for id " +
                                        std::to_string(id));
        total_pos += it->second ? 1 : 0;
    }
    if (total_pos == 0)
        throw std::invalid_argument("gain_curve: no positives, curve undefined");

    auto ranked = scores;
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    GainCurve curve;
    const size_t n = ranked.size();
    curve.points.reserve(n + 1);
    curve.points.emplace_back(0.0, 0.0);
    long long captured = 0;
    for (size_t k = 0; k < n; ++k) {
        captured += truths.at(ranked[k].first) ? 1 : 0;
        curve.points.emplace_back(static_cast<double>(k + 1) / n,
                                  static_cast<double>(captured) / total_pos);
    }
    return curve;
}

std::vector<ComparisonRow> compare_table(
    const std::vector<std::pair<std::string, std::vector<int>>>& predictors,
    const std::vector<int>& truths) {
    std::vector<ComparisonRow> rows;
    rows.reserve(predictors.size());
    for (const auto& [name, preds] : predictors) {
        if (preds.size() != truths.size())
            throw std::invalid_argument("compare_table: predictor " + name +
                                        " does not cover the population");
        rows.push_back({name, metrics(confusion(preds, truths))});
    }
    return rows;
}

void write_comparison_csv(const std::vector<ComparisonRow>& rows,
                          const std::string& path) {
    std::ostringstream out;
    out << "method,precision,recall,balanced_accuracy,weighted_f1\n";
    for (const auto& row : rows)
        out << row.method << ',' << format_double(row.report.precision) << ','
            << format_double(row.report.recall) << ','
            << format_double(row.report.balanced_accuracy) << ','
            << format_double(row.report.weighted_f1) << "\n";
    write_file_atomic(path, out.str());
}

void write_gain_curve_csv(const GainCurve& curve, const std::string& path) {
    std::ostringstream out;
    out << "fraction_targeted,fraction_captured\n";
    for (const auto& [x, y] : curve.points)
        out << format_double(x) << ',' << format_double(y) << "\n";
    write_file_atomic(path, out.str());
}

}  // namespace seg
