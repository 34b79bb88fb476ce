#include <doctest.h>

#include <cstdio>

#include "segpipe/datagen.hpp"
#include "segpipe/domain.hpp"

using namespace seg;

namespace {

Dataset small_valid_dataset() {
    Dataset ds;
    ds.feature_dim = 2;
    ds.horizon_days = 100;
    CustomerRecord a{0, {1.0, 2.0}, true, SegmentLabel::Engaged, LatentIntent::Prompted,
                     ChurnStatus::Never};
    CustomerRecord b{1, {0.5, -1.0}, false, SegmentLabel::Unengaged, LatentIntent::Organic,
                     ChurnStatus::Churned};
    CustomerRecord c{2, {0.0, 0.0}, false, SegmentLabel::Inactive, std::nullopt,
                     ChurnStatus::Never};
    ds.customers = {a, b, c};
    ds.transactions = {{0, 10, 25.5}, {1, 90, 3.0}};
    return ds;
}

}  // namespace

TEST_CASE("class indices are fixed") {
    CHECK(static_cast<int>(SegmentLabel::Engaged) == 0);
    CHECK(static_cast<int>(SegmentLabel::Unengaged) == 1);
    CHECK(static_cast<int>(SegmentLabel::Inactive) == 2);
}

TEST_CASE("validate_dataset: well-formed dataset has no violations") {
    CHECK(validate_dataset(small_valid_dataset()).empty());
}

TEST_CASE("validate_dataset: engaged-but-unexposed customer is flagged by id") {
    Dataset ds = small_valid_dataset();
    ds.customers[0].exposed = false;
    const auto v = validate_dataset(ds);
    REQUIRE(v.size() == 1);
    CHECK(v[0].find("0") != std::string::npos);
    CHECK(v[0].find("engaged") != std::string::npos);
}

TEST_CASE("validate_dataset: transaction with unknown customer id is flagged") {
    Dataset ds = small_valid_dataset();
    ds.transactions.push_back({99, 5, 1.0});
    const auto v = validate_dataset(ds);
    REQUIRE(v.size() == 1);
    CHECK(v[0].find("99") != std::string::npos);
}

TEST_CASE("validate_dataset: duplicate ids and bad features are flagged") {
    Dataset ds = small_valid_dataset();
    ds.customers.push_back(ds.customers[0]);
    const auto v = validate_dataset(ds);
    CHECK(!v.empty());
}

TEST_CASE("dataset CSV round-trip is field-exact") {
    GenConfig cfg;
    cfg.n_customers = 200;
    cfg.seed = 9;
    const Dataset ds = generate_population(cfg);

    const std::string cpath = "roundtrip_customers.csv";
    const std::string tpath = "roundtrip_transactions.csv";
    write_customers_csv(ds, cpath);
    write_transactions_csv(ds, tpath);
    const Dataset back = read_dataset_csv(cpath, tpath, ds.horizon_days);
    std::remove(cpath.c_str());
    std::remove(tpath.c_str());

    REQUIRE(back.customers.size() == ds.customers.size());
    REQUIRE(back.transactions.size() == ds.transactions.size());
    CHECK(back.feature_dim == ds.feature_dim);
    for (size_t i = 0; i < ds.customers.size(); ++i) {
        const auto& a = ds.customers[i];
        const auto& b = back.customers[i];
        CHECK(a.id == b.id);
        CHECK(a.exposed == b.exposed);
        CHECK(a.segment == b.segment);
        CHECK(a.latent_intent == b.latent_intent);
        CHECK(a.churn_status == b.churn_status);
        REQUIRE(a.features.size() == b.features.size());
        for (size_t j = 0; j < a.features.size(); ++j)
            CHECK(a.features[j] == b.features[j]);
    }
    for (size_t i = 0; i < ds.transactions.size(); ++i) {
        CHECK(ds.transactions[i].customer_id == back.transactions[i].customer_id);
        CHECK(ds.transactions[i].day == back.transactions[i].day);
        CHECK(ds.transactions[i].amount == back.transactions[i].amount);
    }
}
