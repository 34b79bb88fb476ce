#include "segpipe/datagen.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "segpipe/config.hpp"

namespace seg {

void GenConfig::validate() const {
    if (n_customers <= 0) throw std::invalid_argument("n_customers must be positive");
    if (feature_dim <= 0) throw std::invalid_argument("feature_dim must be positive");
    double sum = 0;
    for (double p : archetype_mix) {
        if (p < 0 || p > 1) throw std::invalid_argument("archetype_mix entries must be in [0,1]");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("archetype_mix must sum to 1");
    if (feature_separation < 0) throw std::invalid_argument("feature_separation must be >= 0");
    if (noise_scale <= 0) throw std::invalid_argument("noise_scale must be positive");
    if (exposure_rate < 0 || exposure_rate > 1)
        throw std::invalid_argument("exposure_rate must be in [0,1]");
    if (churn_rate < 0 || churn_rate > 1)
        throw std::invalid_argument("churn_rate must be in [0,1]");
    if (horizon_days <= 0) throw std::invalid_argument("horizon_days must be positive");
}

SegmentLabel derive_behavior_label(Archetype a, bool exposed) {
    switch (a) {
        case Archetype::PromptedEngaged:
            return exposed ? SegmentLabel::Engaged : SegmentLabel::Inactive;
        case Archetype::OrganicEngaged:
            return exposed ? SegmentLabel::Engaged : SegmentLabel::Unengaged;
        case Archetype::OrganicUnengaged:
            return SegmentLabel::Unengaged;
        case Archetype::Inactive:
            return SegmentLabel::Inactive;
    }
    return SegmentLabel::Inactive;
}

namespace {

// Feature mean per archetype: separated one-hot directions. OrganicEngaged
// deliberately shares the OrganicUnengaged mean; the engaged/unengaged split
// among organics is exposure, not features.
double archetype_mean(Archetype a, int coord, int dim, double separation) {
    int axis = 0;
    switch (a) {
        case Archetype::PromptedEngaged: axis = 0; break;
        case Archetype::OrganicEngaged:
        case Archetype::OrganicUnengaged: axis = 1 % dim; break;
        case Archetype::Inactive: axis = 2 % dim; break;
    }
    return coord == axis ? separation : 0.0;
}

struct TxnProfile {
    int min_count, max_count;
    int min_day_back, max_day_back;  // days before horizon
    double min_amount, max_amount;
};

TxnProfile txn_profile(Archetype a) {
    switch (a) {
        case Archetype::PromptedEngaged: return {2, 6, 0, 90, 5, 80};
        case Archetype::OrganicEngaged: return {6, 14, 0, 90, 10, 150};
        case Archetype::OrganicUnengaged: return {4, 10, 0, 90, 10, 120};
        case Archetype::Inactive: return {0, 2, 180, 360, 5, 40};
    }
    return {0, 0, 0, 0, 0, 0};
}

}  // namespace

Dataset generate_population(const GenConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, cfg.noise_scale);

    Dataset ds;
    ds.feature_dim = cfg.feature_dim;
    ds.horizon_days = cfg.horizon_days;
    ds.customers.reserve(cfg.n_customers);

    for (int i = 0; i < cfg.n_customers; ++i) {
        CustomerRecord c;
        c.id = i;

        double u = unit(rng);
        Archetype arch = Archetype::Inactive;
        double acc = 0;
        for (int a = 0; a < 4; ++a) {
            acc += cfg.archetype_mix[a];
            if (u < acc) {
                arch = static_cast<Archetype>(a);
                break;
            }
        }

        c.exposed = unit(rng) < cfg.exposure_rate;
        c.latent_intent = arch == Archetype::PromptedEngaged ? LatentIntent::Prompted
                                                             : LatentIntent::Organic;
        c.segment = derive_behavior_label(arch, c.exposed);

        c.features.resize(cfg.feature_dim);
        for (int j = 0; j < cfg.feature_dim; ++j)
            c.features[j] =
                archetype_mean(arch, j, cfg.feature_dim, cfg.feature_separation) +
                noise(rng);

        if (c.segment != SegmentLabel::Inactive && unit(rng) < cfg.churn_rate)
            c.churn_status = ChurnStatus::Churned;

        const TxnProfile prof = txn_profile(arch);
        int count = prof.min_count;
        if (prof.max_count > prof.min_count)
            count += static_cast<int>(unit(rng) * (prof.max_count - prof.min_count + 1));
        if (arch == Archetype::Inactive && unit(rng) < 0.7) count = 0;
        for (int t = 0; t < count; ++t) {
            Transaction tx;
            tx.customer_id = c.id;
            int back = prof.min_day_back +
                       static_cast<int>(unit(rng) * (prof.max_day_back - prof.min_day_back + 1));
            tx.day = std::max(0, cfg.horizon_days - back);
            tx.amount = prof.min_amount + unit(rng) * (prof.max_amount - prof.min_amount);
            ds.transactions.push_back(tx);
        }

        ds.customers.push_back(std::move(c));
    }
    return ds;
}

std::vector<std::pair<std::int64_t, int>> derive_stage2_initial_labels(const Dataset& ds) {
    std::vector<std::pair<std::int64_t, int>> out;
    for (const auto& c : ds.customers) {
        if (c.segment == SegmentLabel::Engaged)
            out.emplace_back(c.id, 1);
        else if (c.segment == SegmentLabel::Unengaged)
            out.emplace_back(c.id, 0);
    }
    return out;
}

GenConfig gen_config_from_file(const std::string& path) {
    KeyValueConfig kv = KeyValueConfig::from_file(path);
    GenConfig cfg;
    cfg.n_customers = kv.get_int("n_customers", cfg.n_customers);
    cfg.feature_dim = kv.get_int("feature_dim", cfg.feature_dim);
    cfg.archetype_mix[0] = kv.get_double("mix_prompted_engaged", cfg.archetype_mix[0]);
    cfg.archetype_mix[1] = kv.get_double("mix_organic_engaged", cfg.archetype_mix[1]);
    cfg.archetype_mix[2] = kv.get_double("mix_organic_unengaged", cfg.archetype_mix[2]);
    cfg.archetype_mix[3] = kv.get_double("mix_inactive", cfg.archetype_mix[3]);
    cfg.feature_separation = kv.get_double("feature_separation", cfg.feature_separation);
    cfg.noise_scale = kv.get_double("noise_scale", cfg.noise_scale);
    cfg.exposure_rate = kv.get_double("exposure_rate", cfg.exposure_rate);
    cfg.churn_rate = kv.get_double("churn_rate", cfg.churn_rate);
    cfg.horizon_days = kv.get_int("horizon_days", cfg.horizon_days);
    cfg.seed = static_cast<std::uint64_t>(kv.get_int("seed", static_cast<long long>(cfg.seed)));
    cfg.validate();
    return cfg;
}

}  // namespace seg
