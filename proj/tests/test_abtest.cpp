#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "segpipe/abtest.hpp"
#include "segpipe/datagen.hpp"

using namespace seg;

namespace {

Dataset strata_population(int churned, int never) {
    Dataset ds;
    ds.feature_dim = 1;
    ds.horizon_days = 10;
    for (int i = 0; i < churned + never; ++i) {
        CustomerRecord c;
        c.id = i;
        c.features = {0.0};
        c.segment = SegmentLabel::Unengaged;
        c.latent_intent = LatentIntent::Organic;
        c.churn_status = i < churned ? ChurnStatus::Churned : ChurnStatus::Never;
        ds.customers.push_back(c);
    }
    return ds;
}

}  // namespace

TEST_CASE("stratified split: exact per-stratum counts, disjoint pool, deterministic") {
    const Dataset ds = strata_population(1000, 2000);
    ArmSizes sizes = {{ChurnStatus::Churned, 500}, {ChurnStatus::Never, 1000}};
    const auto split = stratified_split(ds, sizes, 42);
    CHECK(split.control.size() == 1500);

    int churned_in_control = 0;
    for (auto id : split.control) churned_in_control += id < 1000 ? 1 : 0;
    CHECK(churned_in_control == 500);

    std::unordered_set<std::int64_t> ctrl(split.control.begin(), split.control.end());
    for (auto id : split.pool) CHECK(!ctrl.count(id));
    CHECK(split.control.size() + split.pool.size() == ds.customers.size());

    const auto again = stratified_split(ds, sizes, 42);
    CHECK(again.control == split.control);
    CHECK(again.pool == split.pool);

    sizes[ChurnStatus::Churned] = 1001;
    CHECK_THROWS_AS(stratified_split(ds, sizes, 42), std::invalid_argument);
}

TEST_CASE("select_treatment: top-k by score with id tie-break") {
    const Dataset ds = strata_population(0, 3);
    const std::vector<std::int64_t> pool = {0, 1, 2};
    ArmSizes sizes = {{ChurnStatus::Never, 2}};

    std::unordered_map<std::int64_t, double> scores = {{0, 0.9}, {1, 0.5}, {2, 0.1}};
    auto picked = select_treatment(ds, pool, scores, sizes);
    CHECK(picked == std::vector<std::int64_t>{0, 1});

    scores = {{0, 0.5}, {1, 0.5}, {2, 0.5}};
    picked = select_treatment(ds, pool, scores, sizes);
    CHECK(picked == std::vector<std::int64_t>{0, 1});  // lowest ids on ties

    sizes[ChurnStatus::Never] = 3;
    picked = select_treatment(ds, pool, scores, sizes);
    CHECK(picked.size() == 3);

    sizes[ChurnStatus::Never] = 4;
    CHECK_THROWS_AS(select_treatment(ds, pool, scores, sizes), std::invalid_argument);
}

TEST_CASE("simulate_campaign rejects overlapping arms") {
    const Dataset ds = strata_population(0, 10);
    const auto model = conversion_model_from_intent(ds);
    CHECK_THROWS_AS(simulate_campaign(ds, {0, 1, 2}, {2, 3}, model, 1),
                    std::invalid_argument);
}

TEST_CASE("lift identity: reported lift reproduces from stored unrounded rates") {
    GenConfig cfg;
    cfg.n_customers = 4000;
    cfg.seed = 19;
    const Dataset ds = generate_population(cfg);
    std::vector<std::int64_t> control, treatment;
    for (const auto& c : ds.customers)
        (c.id % 2 == 0 ? control : treatment).push_back(c.id);
    const auto model = conversion_model_from_intent(ds);
    const auto report = simulate_campaign(ds, control, treatment, model, 3);

    if (report.control_total.conversion_rate > 0) {
        const double lift = report.treatment_total.conversion_rate /
                                report.control_total.conversion_rate -
                            1.0;
        CHECK(std::abs(lift - report.conversion_lift) <= 1e-12);
    }
    const double vlift =
        report.treatment_total.site_visit_rate / report.control_total.site_visit_rate -
        1.0;
    CHECK(std::abs(vlift - report.visit_lift) <= 1e-12);
    CHECK(report.control_total.user_count == 2000);
    CHECK(report.treatment_total.user_count == 2000);
}

TEST_CASE("example lift arithmetic: 0.17% to 0.34% doubles the rate") {
    ArmStats control, treatment;
    control.conversion_rate = 0.0017;
    treatment.conversion_rate = 0.0034;
    const double lift = treatment.conversion_rate / control.conversion_rate - 1.0;
    CHECK(lift == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("two-proportion z-test: symmetric inputs, clear separations") {
    CHECK(two_proportion_p_value(50, 1000, 50, 1000) == doctest::Approx(1.0));
    CHECK(two_proportion_p_value(100, 1000, 50, 1000) < 0.01);
    CHECK(two_proportion_p_value(0, 10, 0, 10) == 1.0);
    const double ab = two_proportion_p_value(30, 500, 60, 500);
    const double ba = two_proportion_p_value(60, 500, 30, 500);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-15));
}

TEST_CASE("deterministic simulation under a fixed seed") {
    const Dataset ds = strata_population(200, 200);
    ArmSizes sizes = {{ChurnStatus::Churned, 50}, {ChurnStatus::Never, 50}};
    const auto split = stratified_split(ds, sizes, 9);
    std::unordered_map<std::int64_t, double> scores;
    for (auto id : split.pool) scores[id] = 0.5;
    const auto treatment = select_treatment(ds, split.pool, scores, sizes);
    const auto model = conversion_model_from_intent(ds);
    const auto a = simulate_campaign(ds, split.control, treatment, model, 77);
    const auto b = simulate_campaign(ds, split.control, treatment, model, 77);
    CHECK(a.control_total.conversions == b.control_total.conversions);
    CHECK(a.treatment_total.visits == b.treatment_total.visits);
    CHECK(a.p_value == b.p_value);
}
