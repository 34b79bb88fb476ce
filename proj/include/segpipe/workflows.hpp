#pragma once

#include <cstdint>
#include <vector>

#include "segpipe/abtest.hpp"
#include "segpipe/domain.hpp"
#include "segpipe/evaluate.hpp"
#include "segpipe/rfm.hpp"
#include "segpipe/stage2.hpp"

namespace seg {

// Evaluation population for the model-vs-baseline table: the stage-2
// customers (Engaged + Unengaged) with known latent intent; the positive
// class is Prompted.
struct EvalPopulation {
    std::vector<std::int64_t> ids;
    std::vector<int> truths;
};

EvalPopulation stage2_eval_population(const Dataset& ds);

// Table-style comparison: the model's thresholded predictions against each
// named RFM segment used as a binary predictor, on the same population.
std::vector<ComparisonRow> build_comparison(const Dataset& ds, const Stage2Model& model,
                                            double threshold,
                                            const std::vector<RfmRule>& rules);

// Gain curve of the stage-2 scores against latent intent.
GainCurve build_gain_curve(const Dataset& ds, const Stage2Model& model);

// Full stratified A/B simulation: split, rank the pool by model score, pick
// the treatment arm, simulate the campaign.
ABTestReport run_ab_experiment(const Dataset& ds, const Stage2Model& model,
                               const ArmSizes& sizes, std::uint64_t seed);

}  // namespace seg
