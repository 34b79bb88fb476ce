#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "segpipe/domain.hpp"

namespace seg {

// Ground-truth per-customer campaign response under exposure: probability of
// a site visit, and of conversion given a visit.
struct ResponseProbs {
    double visit = 0.0;
    double convert_given_visit = 0.0;
};

using ConversionModel = std::unordered_map<std::int64_t, ResponseProbs>;

// Default response model derived from latent intent and segment. Prompted
// customers respond strongly when exposed; organics convert at their organic
// base rate regardless of the campaign.
ConversionModel conversion_model_from_intent(const Dataset& ds);

// Per-stratum arm sizes, keyed by churn status.
using ArmSizes = std::map<ChurnStatus, int>;

struct SplitResult {
    std::vector<std::int64_t> control;
    std::vector<std::int64_t> pool;  // remaining candidates for treatment
};

// Uniform sampling without replacement within each stratum; control gets
// exactly the requested count per stratum. Deterministic in seed.
SplitResult stratified_split(const Dataset& ds, const ArmSizes& sizes,
                             std::uint64_t seed);

// Top-k by score per stratum (ties by ascending id) from the candidate pool.
std::vector<std::int64_t> select_treatment(
    const Dataset& ds, const std::vector<std::int64_t>& pool,
    const std::unordered_map<std::int64_t, double>& scores, const ArmSizes& sizes);

struct ArmStats {
    long long user_count = 0;
    double site_visit_rate = 0.0;
    double conversion_rate = 0.0;  // conversions / users, unrounded
    long long visits = 0;
    long long conversions = 0;
};

struct ABTestReport {
    std::map<std::pair<std::string, std::string>, ArmStats> by_arm_stratum;
    ArmStats control_total, treatment_total;
    double visit_lift = 0.0;       // treatment/control - 1 on unrounded rates
    double conversion_lift = 0.0;
    double p_value = 1.0;          // two-sided two-proportion z-test on conversion
};

// Both arms get identical campaign exposure; the difference between arms is
// purely who was selected. Bernoulli visit draw, then conversion given visit.
ABTestReport simulate_campaign(const Dataset& ds,
                               const std::vector<std::int64_t>& control,
                               const std::vector<std::int64_t>& treatment,
                               const ConversionModel& model, std::uint64_t seed);

// Two-sided two-proportion z-test p-value on pooled successes.
double two_proportion_p_value(long long success_a, long long n_a, long long success_b,
                              long long n_b);

// CSV `group,stratum,user_count,site_visit_rate,conversion_rate` plus summary
// rows with lifts and the p-value.
void write_abtest_csv(const ABTestReport& report, const std::string& path);

}  // namespace seg
