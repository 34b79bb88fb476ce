#include "segpipe/workflows.hpp"

#include <stdexcept>
#include <unordered_map>

namespace seg {

EvalPopulation stage2_eval_population(const Dataset& ds) {
    EvalPopulation pop;
    for (const auto& c : ds.customers) {
        if (c.segment == SegmentLabel::Inactive) continue;
        if (!c.latent_intent)
            throw std::invalid_argument("stage2_eval_population: customer " +
                                        std::to_string(c.id) + " has no latent intent");
        pop.ids.push_back(c.id);
        pop.truths.push_back(*c.latent_intent == LatentIntent::Prompted ? 1 : 0);
    }
    return pop;
}

std::vector<ComparisonRow> build_comparison(const Dataset& ds, const Stage2Model& model,
                                            double threshold,
                                            const std::vector<RfmRule>& rules) {
    const EvalPopulation pop = stage2_eval_population(ds);

    const auto scores = score_customers(model, ds, pop.ids);
    std::unordered_map<std::int64_t, double> score_of;
    for (const auto& [id, s] : scores) score_of[id] = s;

    const auto rfm = rfm_scores(ds, ds.horizon_days);
    std::unordered_map<std::int64_t, RfmSegmentName> seg_of;
    for (const auto& s : rfm) seg_of[s.customer_id] = rfm_segment(s, rules);

    std::vector<int> model_preds;
    model_preds.reserve(pop.ids.size());
    for (auto id : pop.ids) model_preds.push_back(score_of.at(id) >= threshold ? 1 : 0);

    std::vector<std::pair<std::string, std::vector<int>>> predictors;
    for (RfmSegmentName target :
         {RfmSegmentName::Champions, RfmSegmentName::LoyalCustomers,
          RfmSegmentName::PotentialLoyalists}) {
        std::vector<int> preds;
        preds.reserve(pop.ids.size());
        for (auto id : pop.ids) preds.push_back(seg_of.at(id) == target ? 1 : 0);
        predictors.emplace_back(to_string(target), std::move(preds));
    }
    predictors.emplace_back("model_segment", std::move(model_preds));
    return compare_table(predictors, pop.truths);
}

GainCurve build_gain_curve(const Dataset& ds, const Stage2Model& model) {
    const EvalPopulation pop = stage2_eval_population(ds);
    const auto scores = score_customers(model, ds, pop.ids);
    std::unordered_map<std::int64_t, int> truths;
    for (size_t i = 0; i < pop.ids.size(); ++i) truths[pop.ids[i]] = pop.truths[i];
    return gain_curve(scores, truths);
}

ABTestReport run_ab_experiment(const Dataset& ds, const Stage2Model& model,
                               const ArmSizes& sizes, std::uint64_t seed) {
    const SplitResult split = stratified_split(ds, sizes, seed);
    const auto scored = score_customers(model, ds, split.pool);
    std::unordered_map<std::int64_t, double> score_of;
    for (const auto& [id, s] : scored) score_of[id] = s;
    const auto treatment = select_treatment(ds, split.pool, score_of, sizes);
    const auto conv = conversion_model_from_intent(ds);
    return simulate_campaign(ds, split.control, treatment, conv, seed + 1);
}

}  // namespace seg
