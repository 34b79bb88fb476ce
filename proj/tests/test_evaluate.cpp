#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "segpipe/evaluate.hpp"

using namespace seg;

namespace {

// brute-force metric oracle: exhaustive counting, no shared code with metrics()
struct OracleMetrics {
    double precision, recall, specificity, balanced_accuracy, weighted_f1;
};

OracleMetrics brute_force_metrics(const std::vector<int>& preds,
                                  const std::vector<int>& truths) {
    auto count = [&](int p, int t) {
        long long n = 0;
        for (size_t i = 0; i < preds.size(); ++i)
            if (preds[i] == p && truths[i] == t) ++n;
        return n;
    };
    const long long tp = count(1, 1), fp = count(1, 0), fn = count(0, 1), tn = count(0, 0);
    auto safe = [](long long a, long long b) {
        return b == 0 ? 0.0 : static_cast<double>(a) / b;
    };
    OracleMetrics o;
    o.precision = safe(tp, tp + fp);
    o.recall = safe(tp, tp + fn);
    o.specificity = safe(tn, tn + fp);
    o.balanced_accuracy = (o.recall + o.specificity) / 2;
    const double pp = safe(tp, tp + fp), rp = safe(tp, tp + fn);
    const double pn = safe(tn, tn + fn), rn = safe(tn, tn + fp);
    const double f1p = pp + rp == 0 ? 0 : 2 * pp * rp / (pp + rp);
    const double f1n = pn + rn == 0 ? 0 : 2 * pn * rn / (pn + rn);
    o.weighted_f1 = ((tp + fn) * f1p + (tn + fp) * f1n) / static_cast<double>(preds.size());
    return o;
}

// independent gain-curve oracle: stable-sorts (score desc, id asc) and counts
std::vector<double> brute_force_gain(const std::vector<std::pair<std::int64_t, double>>& scores,
                                     const std::unordered_map<std::int64_t, int>& truths) {
    auto ranked = scores;
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    long long total = 0;
    for (const auto& [id, s] : ranked) total += truths.at(id);
    std::vector<double> captured = {0.0};
    long long c = 0;
    for (const auto& [id, s] : ranked) {
        c += truths.at(id);
        captured.push_back(static_cast<double>(c) / total);
    }
    return captured;
}

}  // namespace

TEST_CASE("confusion: worked examples") {
    auto c = confusion({1, 0}, {1, 0});
    CHECK(c.tp == 1);
    CHECK(c.tn == 1);
    CHECK(c.fp == 0);
    CHECK(c.fn == 0);

    c = confusion({1, 1}, {0, 0});
    CHECK(c.fp == 2);

    c = confusion({1, 1, 1, 1, 0, 0, 0, 0, 0, 0}, {1, 1, 1, 0, 1, 1, 0, 0, 0, 0});
    CHECK(c.tp == 3);
    CHECK(c.fp == 1);
    CHECK(c.fn == 2);
    CHECK(c.tn == 4);

    CHECK_THROWS_AS(confusion({1}, {1, 0}), std::invalid_argument);
    CHECK_THROWS_AS(confusion({}, {}), std::invalid_argument);
}

TEST_CASE("metrics: hand-computed example") {
    const auto r = metrics({3, 1, 2, 4});
    CHECK(r.precision == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(r.recall == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(r.specificity == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(r.balanced_accuracy == doctest::Approx(0.7).epsilon(1e-12));
    // F1+ = 2*0.75*0.6/1.35, F1- = 2*(4/6)*0.8/(4/6+0.8), support 5/5
    CHECK(r.weighted_f1 == doctest::Approx(0.696969696969697).epsilon(1e-9));
}

TEST_CASE("metrics: perfect predictions give all ones") {
    const auto r = metrics({5, 0, 0, 5});
    CHECK(r.precision == 1.0);
    CHECK(r.recall == 1.0);
    CHECK(r.specificity == 1.0);
    CHECK(r.balanced_accuracy == 1.0);
    CHECK(r.weighted_f1 == 1.0);
    CHECK(!r.zero_denominator);
}

TEST_CASE("metrics: zero denominators become 0 with a flag") {
    const auto r = metrics({0, 0, 0, 4});  // no positives predicted or present
    CHECK(r.precision == 0.0);
    CHECK(r.recall == 0.0);
    CHECK(r.zero_denominator);
}

TEST_CASE("metrics agree exactly with the brute-force oracle on 1000 random sets") {
    std::mt19937_64 rng(1234);
    std::uniform_int_distribution<int> size_dist(1, 50);
    std::uniform_int_distribution<int> bit(0, 1);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = size_dist(rng);
        std::vector<int> preds(n), truths(n);
        for (int i = 0; i < n; ++i) {
            preds[i] = bit(rng);
            truths[i] = bit(rng);
        }
        const auto got = metrics(confusion(preds, truths));
        const auto want = brute_force_metrics(preds, truths);
        CHECK(got.precision == want.precision);
        CHECK(got.recall == want.recall);
        CHECK(got.specificity == want.specificity);
        CHECK(got.balanced_accuracy == want.balanced_accuracy);
        CHECK(got.weighted_f1 == want.weighted_f1);
    }
}

TEST_CASE("weighted F1 equals macro F1 when supports are equal") {
    const auto r = metrics({3, 1, 2, 4});  // 5 positives, 5 negatives
    const double f1p = 2 * 0.75 * 0.6 / 1.35;
    const double f1n = 2 * (4.0 / 6) * 0.8 / (4.0 / 6 + 0.8);
    CHECK(r.weighted_f1 == doctest::Approx((f1p + f1n) / 2).epsilon(1e-12));
}

TEST_CASE("gain curve: worked example") {
    const std::vector<std::pair<std::int64_t, double>> scores = {
        {0, 0.9}, {1, 0.8}, {2, 0.7}, {3, 0.1}};
    const std::unordered_map<std::int64_t, int> truths = {{0, 1}, {1, 0}, {2, 1}, {3, 0}};
    const auto curve = gain_curve(scores, truths);
    REQUIRE(curve.points.size() == 5);
    CHECK(curve.points[0] == std::pair<double, double>{0.0, 0.0});
    CHECK(curve.points[1].second == doctest::Approx(0.5));
    CHECK(curve.points[2].second == doctest::Approx(0.5));
    CHECK(curve.points[3].second == doctest::Approx(1.0));
    CHECK(curve.points[4] == std::pair<double, double>{1.0, 1.0});
}

TEST_CASE("gain curve: perfect scorer reaches 1.0 at the prevalence fraction") {
    std::vector<std::pair<std::int64_t, double>> scores;
    std::unordered_map<std::int64_t, int> truths;
    for (int i = 0; i < 10; ++i) {
        const int truth = i < 2 ? 1 : 0;  // prevalence 20%
        scores.emplace_back(i, truth ? 0.9 : 0.1);
        truths[i] = truth;
    }
    const auto curve = gain_curve(scores, truths);
    CHECK(curve.points[2].first == doctest::Approx(0.2));
    CHECK(curve.points[2].second == doctest::Approx(1.0));
    CHECK(curve.points[1].second == doctest::Approx(0.5));
}

TEST_CASE("gain curve: uniform scores fall back to id order") {
    std::vector<std::pair<std::int64_t, double>> scores = {
        {3, 0.5}, {1, 0.5}, {2, 0.5}};
    const std::unordered_map<std::int64_t, int> truths = {{1, 1}, {2, 0}, {3, 0}};
    const auto curve = gain_curve(scores, truths);
    CHECK(curve.points[1].second == doctest::Approx(1.0));  // id 1 first
}

TEST_CASE("gain curve rejects zero positives and missing truths") {
    const std::vector<std::pair<std::int64_t, double>> scores = {{0, 0.4}};
    CHECK_THROWS_AS(gain_curve(scores, {{0, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(gain_curve(scores, {}), std::invalid_argument);
}

TEST_CASE("gain curve matches the enumeration oracle on 200 random instances") {
    std::mt19937_64 rng(555);
    std::uniform_int_distribution<int> size_dist(1, 12);
    std::uniform_int_distribution<int> score_level(0, 3);  // ties are common
    std::uniform_int_distribution<int> bit(0, 1);
    int done = 0;
    while (done < 200) {
        const int n = size_dist(rng);
        std::vector<std::pair<std::int64_t, double>> scores;
        std::unordered_map<std::int64_t, int> truths;
        bool any_pos = false;
        for (int i = 0; i < n; ++i) {
            scores.emplace_back(i, score_level(rng) * 0.25);
            const int t = bit(rng);
            truths[i] = t;
            any_pos = any_pos || t;
        }
        if (!any_pos) continue;
        ++done;
        const auto curve = gain_curve(scores, truths);
        const auto want = brute_force_gain(scores, truths);
        REQUIRE(curve.points.size() == want.size());
        for (size_t k = 0; k < want.size(); ++k)
            CHECK(curve.points[k].second == want[k]);
        // endpoints and monotonicity
        CHECK(curve.points.front() == std::pair<double, double>{0.0, 0.0});
        CHECK(curve.points.back().first == doctest::Approx(1.0));
        CHECK(curve.points.back().second == doctest::Approx(1.0));
        for (size_t k = 1; k < curve.points.size(); ++k) {
            CHECK(curve.points[k].first >= curve.points[k - 1].first);
            CHECK(curve.points[k].second >= curve.points[k - 1].second - 1e-15);
        }
    }
}

TEST_CASE("perfect scorer dominates any other scorer pointwise") {
    std::mt19937_64 rng(808);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> bit(0, 1);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 20;
        std::unordered_map<std::int64_t, int> truths;
        std::vector<std::pair<std::int64_t, double>> random_scores, perfect_scores;
        bool any_pos = false;
        for (int i = 0; i < n; ++i) {
            const int t = bit(rng);
            truths[i] = t;
            any_pos = any_pos || t;
            random_scores.emplace_back(i, u(rng));
            perfect_scores.emplace_back(i, t ? 1.0 : 0.0);
        }
        if (!any_pos) continue;
        const auto perfect = gain_curve(perfect_scores, truths);
        const auto other = gain_curve(random_scores, truths);
        for (size_t k = 0; k < perfect.points.size(); ++k)
            CHECK(perfect.points[k].second >= other.points[k].second - 1e-15);
    }
}

TEST_CASE("compare_table: oracle model dominates, identical predictors match") {
    const std::vector<int> truths = {1, 1, 0, 0, 1, 0};
    const std::vector<int> oracle = truths;
    const std::vector<int> weak = {1, 0, 1, 0, 0, 0};
    const auto rows = compare_table({{"model", oracle}, {"champions", weak}}, truths);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].report.balanced_accuracy == 1.0);
    CHECK(rows[0].report.balanced_accuracy >= rows[1].report.balanced_accuracy);

    const auto same = compare_table({{"a", weak}, {"b", weak}}, truths);
    CHECK(same[0].report.weighted_f1 == same[1].report.weighted_f1);

    CHECK_THROWS_AS(compare_table({{"bad", {1, 0}}}, truths), std::invalid_argument);
}
