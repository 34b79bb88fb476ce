#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "segpipe/domain.hpp"

namespace seg {

// Linear-sigmoid binary intent classifier.
struct Stage2Model {
    std::vector<double> weights;
    double bias = 0.0;

    int dim() const { return static_cast<int>(weights.size()); }
};

Stage2Model make_stage2_model(int dim);

// sigmoid(w.x + b), numerically stable, clamped to [1e-12, 1-1e-12].
double sigmoid_forward(const Stage2Model& m, const std::vector<double>& x);

// Per-sample loss with self-paced correction of the positive branch:
//   label 1, p >  tau  -> -log p
//   label 1, p <= tau  -> -log(1-p)   (suspected false positive)
//   label 0            -> -log(1-p)
// tau <= 0 disables correction (plain BCE); used internally for warm-up.
double splc_sample_loss(double p, int label, double tau);

struct Stage2Gradient {
    std::vector<double> d_weights;
    double d_bias = 0.0;
};

// Gradient of the mean splc_sample_loss over the batch. The branch indicator
// is fixed at the forward pass; no gradient flows through it.
Stage2Gradient splc_batch_gradient(const Stage2Model& m,
                                   const std::vector<const std::vector<double>*>& xs,
                                   const std::vector<int>& labels, double tau);

enum class TauSchedule { Constant, LinearRamp };

struct SplcConfig {
    double tau = 0.5;
    int warmup_epochs = 5;  // plain BCE before correction activates
    int epochs = 60;
    double learning_rate = 0.5;
    int batch_size = 64;
    std::uint64_t seed = 0;
    TauSchedule tau_schedule = TauSchedule::Constant;
    double ramp_start = 0.05;
    int ramp_epochs = 10;
    bool sticky = false;  // once flipped, a positive stays relabeled

    void validate() const;
};

struct CorrectionEntry {
    std::int64_t id = 0;
    int initial_label = 0;
    double p = 0.0;       // final-model probability
    bool corrected = false;  // initial positive with p <= tau at the final epoch
};

struct Stage2TrainResult {
    Stage2Model model;
    std::vector<CorrectionEntry> report;  // one entry per training sample, id order
    std::vector<double> loss_history;     // mean loss per epoch (post-update)
};

// labels: output of derive_stage2_initial_labels (Inactive already excluded).
Stage2TrainResult train_stage2(const Dataset& ds,
                               const std::vector<std::pair<std::int64_t, int>>& labels,
                               const SplcConfig& cfg);

// (id, p) sorted descending by p, ties by ascending id. Unknown ids rejected.
std::vector<std::pair<std::int64_t, double>> score_customers(
    const Stage2Model& m, const Dataset& ds, const std::vector<std::int64_t>& ids);

// Flat text: d, then weights, then bias, one value per line.
void save_stage2_model(const Stage2Model& m, const std::string& path);
Stage2Model load_stage2_model(const std::string& path);

// CSV `id,initial_label,p,corrected`
void write_correction_report_csv(const std::vector<CorrectionEntry>& report,
                                 const std::string& path);
// CSV `id,score`
void write_scores_csv(const std::vector<std::pair<std::int64_t, double>>& scores,
                      const std::string& path);

}  // namespace seg
