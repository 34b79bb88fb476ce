#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "segpipe/domain.hpp"

namespace seg {

// Linear-softmax behavior classifier over the three segments.
struct Stage1Model {
    int dim = 0;
    std::vector<double> weights;  // row-major, kNumSegments x dim
    std::array<double, kNumSegments> bias = {0, 0, 0};
    std::array<double, kNumSegments> class_weights = {1, 1, 1};

    double weight_at(int cls, int j) const { return weights[cls * dim + j]; }
};

Stage1Model make_stage1_model(int dim);

// Softmax with max-logit subtraction; entries in (0,1), sum 1.
std::array<double, kNumSegments> softmax_forward(const Stage1Model& m,
                                                 const std::vector<double>& x);

// Sum over samples of -w_c y_ic log p_ic, probabilities clamped to
// [1e-12, 1-1e-12] before the log. Sum form, not mean.
double weighted_cce_loss(const std::vector<std::array<double, kNumSegments>>& probs,
                         const std::vector<SegmentLabel>& labels,
                         const std::array<double, kNumSegments>& w);

// w_c = N / (C * n_c); throws if a class is absent, naming it.
std::array<double, kNumSegments> class_weights_from_frequencies(
    const std::vector<SegmentLabel>& labels);

// Gradient of the *mean* weighted CCE over the batch, plus optional L2.
struct Stage1Gradient {
    std::vector<double> d_weights;  // same layout as Stage1Model::weights
    std::array<double, kNumSegments> d_bias;
};
Stage1Gradient stage1_batch_gradient(const Stage1Model& m,
                                     const std::vector<const std::vector<double>*>& xs,
                                     const std::vector<SegmentLabel>& labels,
                                     double l2 = 0.0);

enum class WeightMode { Uniform, InverseFrequency, Explicit };

struct Stage1TrainConfig {
    double learning_rate = 0.1;
    int epochs = 100;
    int batch_size = 64;
    std::uint64_t seed = 0;
    WeightMode weight_mode = WeightMode::InverseFrequency;
    std::array<double, kNumSegments> explicit_weights = {1, 1, 1};
    double l2 = 0.0;

    void validate() const;
};

struct Stage1TrainResult {
    Stage1Model model;
    std::vector<double> loss_history;  // mean weighted CCE per epoch
};

Stage1TrainResult train_stage1(const Dataset& ds, const Stage1TrainConfig& cfg);

enum class FilterPolicy { ArgmaxNotInactive, InactiveProbBelow };

// Ids passing the active filter, in dataset order. Argmax ties break toward
// the lower class index.
std::vector<std::int64_t> filter_active(const Stage1Model& m, const Dataset& ds,
                                        FilterPolicy policy, double inactive_tau = 0.5);

// Flat text serialization: C d, then W row-major, then b, then class weights,
// one value per line at full precision.
void save_stage1_model(const Stage1Model& m, const std::string& path);
Stage1Model load_stage1_model(const std::string& path);

}  // namespace seg
