#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "segpipe/domain.hpp"

namespace seg {

// Generative archetypes behind the three observed segments. PromptedEngaged
// and OrganicEngaged look identical to the classifier only through features;
// OrganicEngaged shares the feature distribution of OrganicUnengaged, which is
// what makes its engaged members mislabeled positives.
enum class Archetype : int {
    PromptedEngaged = 0,
    OrganicEngaged = 1,
    OrganicUnengaged = 2,
    Inactive = 3
};

struct GenConfig {
    int n_customers = 1000;
    int feature_dim = 16;
    // order: PromptedEngaged, OrganicEngaged, OrganicUnengaged, Inactive
    std::array<double, 4> archetype_mix = {0.25, 0.25, 0.25, 0.25};
    double feature_separation = 2.0;
    double noise_scale = 1.0;
    double exposure_rate = 0.7;
    double churn_rate = 0.4;  // Churned share among non-inactive customers
    int horizon_days = 365;
    std::uint64_t seed = 0;

    // throws std::invalid_argument on a bad config
    void validate() const;
};

// Observed segment implied by archetype and exposure. Prompted customers need
// the campaign: unexposed PromptedEngaged falls into Inactive.
SegmentLabel derive_behavior_label(Archetype a, bool exposed);

Dataset generate_population(const GenConfig& cfg);

// Engaged -> 1, Unengaged -> 0, Inactive excluded.
std::vector<std::pair<std::int64_t, int>> derive_stage2_initial_labels(const Dataset& ds);

GenConfig gen_config_from_file(const std::string& path);

}  // namespace seg
