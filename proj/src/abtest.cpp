#include "segpipe/abtest.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "segpipe/io.hpp"

namespace seg {

ConversionModel conversion_model_from_intent(const Dataset& ds) {
    ConversionModel model;
    model.reserve(ds.customers.size());
    for (const auto& c : ds.customers) {
        ResponseProbs p;
        if (c.latent_intent == LatentIntent::Prompted) {
            // responds strongly to the campaign it is being exposed to
            p = {0.90, 0.030};
        } else if (c.segment == SegmentLabel::Inactive) {
            p = {0.30, 0.004};
        } else {
            // organic base rate, unchanged by the campaign
            p = {0.70, 0.012};
        }
        model[c.id] = p;
    }
    return model;
}

SplitResult stratified_split(const Dataset& ds, const ArmSizes& sizes,
                             std::uint64_t seed) {
    std::map<ChurnStatus, std::vector<std::int64_t>> strata;
    for (const auto& c : ds.customers) strata[c.churn_status].push_back(c.id);

    std::mt19937_64 rng(seed);
    SplitResult res;
    for (const auto& [status, want] : sizes) {
        auto it = strata.find(status);
        const int have = it == strata.end() ? 0 : static_cast<int>(it->second.size());
        if (want <= 0) throw std::invalid_argument("stratified_split: arm size must be positive");
        if (want > have)
            throw std::invalid_argument(
                std::string("stratified_split: stratum ") + to_string(status) + " has " +
                std::to_string(have) + " customers, need " + std::to_string(want));
        auto& ids = it->second;
        std::sort(ids.begin(), ids.end());
        std::shuffle(ids.begin(), ids.end(), rng);
        res.control.insert(res.control.end(), ids.begin(), ids.begin() + want);
        res.pool.insert(res.pool.end(), ids.begin() + want, ids.end());
    }
    std::sort(res.control.begin(), res.control.end());
    std::sort(res.pool.begin(), res.pool.end());
    return res;
}

std::vector<std::int64_t> select_treatment(
    const Dataset& ds, const std::vector<std::int64_t>& pool,
    const std::unordered_map<std::int64_t, double>& scores, const ArmSizes& sizes) {
    std::map<ChurnStatus, std::vector<std::int64_t>> strata;
    for (const auto& c : ds.customers) strata[c.churn_status] = {};
    std::unordered_map<std::int64_t, ChurnStatus> churn_of;
    churn_of.reserve(ds.customers.size());
    for (const auto& c : ds.customers) churn_of[c.id] = c.churn_status;

    for (auto id : pool) {
        auto it = churn_of.find(id);
        if (it == churn_of.end())
            throw std::invalid_argument("select_treatment: unknown id " + std::to_string(id));
        strata[it->second].push_back(id);
    }

    std::vector<std::int64_t> treatment;
    for (const auto& [status, want] : sizes) {
        auto& ids = strata[status];
        if (static_cast<int>(ids.size()) < want)
            throw std::invalid_argument(std::string("select_treatment: stratum ") +
                                        to_string(status) + " pool too small");
        auto score_of = [&](std::int64_t id) {
            auto it = scores.find(id);
            if (it == scores.end())
                throw std::invalid_argument("select_treatment: missing score for id " +
                                            std::to_string(id));
            return it->second;
        };
        std::sort(ids.begin(), ids.end(), [&](std::int64_t a, std::int64_t b) {
            const double sa = score_of(a), sb = score_of(b);
            if (sa != sb) return sa > sb;
            return a < b;
        });
        treatment.insert(treatment.end(), ids.begin(), ids.begin() + want);
    }
    std::sort(treatment.begin(), treatment.end());
    return treatment;
}

double two_proportion_p_value(long long success_a, long long n_a, long long success_b,
                              long long n_b) {
    if (n_a <= 0 || n_b <= 0) return 1.0;
    const double p_pool =
        static_cast<double>(success_a + success_b) / static_cast<double>(n_a + n_b);
    const double se =
        std::sqrt(p_pool * (1.0 - p_pool) * (1.0 / n_a + 1.0 / n_b));
    if (se == 0.0) return 1.0;
    const double z = (static_cast<double>(success_a) / n_a -
                      static_cast<double>(success_b) / n_b) /
                     se;
    return std::erfc(std::abs(z) / std::sqrt(2.0));
}

ABTestReport simulate_campaign(const Dataset& ds,
                               const std::vector<std::int64_t>& control,
                               const std::vector<std::int64_t>& treatment,
                               const ConversionModel& model, std::uint64_t seed) {
    std::unordered_set<std::int64_t> ctrl(control.begin(), control.end());
    for (auto id : treatment)
        if (ctrl.count(id))
            throw std::invalid_argument("simulate_campaign: arms overlap at id " +
                                        std::to_string(id));

    std::unordered_map<std::int64_t, ChurnStatus> churn_of;
    churn_of.reserve(ds.customers.size());
    for (const auto& c : ds.customers) churn_of[c.id] = c.churn_status;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    ABTestReport report;

    auto run_arm = [&](const std::vector<std::int64_t>& arm, const std::string& name,
                       ArmStats& total) {
        auto ids = arm;
        std::sort(ids.begin(), ids.end());
        for (auto id : ids) {
            auto mit = model.find(id);
            if (mit == model.end())
                throw std::invalid_argument("simulate_campaign: no response probs for id " +
                                            std::to_string(id));
            auto cit = churn_of.find(id);
            if (cit == churn_of.end())
                throw std::invalid_argument("simulate_campaign: unknown id " +
                                            std::to_string(id));
            auto& cell = report.by_arm_stratum[{name, to_string(cit->second)}];
            cell.user_count++;
            total.user_count++;
            const bool visited = unit(rng) < mit->second.visit;
            if (visited) {
                cell.visits++;
                total.visits++;
                if (unit(rng) < mit->second.convert_given_visit) {
                    cell.conversions++;
                    total.conversions++;
                }
            }
        }
    };
    run_arm(control, "control", report.control_total);
    run_arm(treatment, "treatment", report.treatment_total);

    auto finalize = [](ArmStats& s) {
        if (s.user_count > 0) {
            s.site_visit_rate = static_cast<double>(s.visits) / s.user_count;
            s.conversion_rate = static_cast<double>(s.conversions) / s.user_count;
        }
    };
    for (auto& [key, cell] : report.by_arm_stratum) finalize(cell);
    finalize(report.control_total);
    finalize(report.treatment_total);

    if (report.control_total.site_visit_rate > 0)
        report.visit_lift = report.treatment_total.site_visit_rate /
                                report.control_total.site_visit_rate -
                            1.0;
    if (report.control_total.conversion_rate > 0)
        report.conversion_lift = report.treatment_total.conversion_rate /
                                     report.control_total.conversion_rate -
                                 1.0;
    report.p_value = two_proportion_p_value(
        report.treatment_total.conversions, report.treatment_total.user_count,
        report.control_total.conversions, report.control_total.user_count);
    return report;
}

void write_abtest_csv(const ABTestReport& report, const std::string& path) {
    std::ostringstream out;
    out << "group,stratum,user_count,site_visit_rate,conversion_rate\n";
    for (const auto& [key, cell] : report.by_arm_stratum)
        out << key.first << ',' << key.second << ',' << cell.user_count << ','
            << format_double(cell.site_visit_rate) << ','
            << format_double(cell.conversion_rate) << "\n";
    out << "control,all," << report.control_total.user_count << ','
        << format_double(report.control_total.site_visit_rate) << ','
        << format_double(report.control_total.conversion_rate) << "\n";
    out << "treatment,all," << report.treatment_total.user_count << ','
        << format_double(report.treatment_total.site_visit_rate) << ','
        << format_double(report.treatment_total.conversion_rate) << "\n";
    out << "summary,visit_lift," << format_double(report.visit_lift) << ",,\n";
    out << "summary,conversion_lift," << format_double(report.conversion_lift) << ",,\n";
    out << "summary,p_value," << format_double(report.p_value) << ",,\n";
    write_file_atomic(path, out.str());
}

}  // namespace seg
