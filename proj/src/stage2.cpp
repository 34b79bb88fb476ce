#include "segpipe/stage2.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "segpipe/io.hpp"

namespace seg {

namespace {
constexpr double kProbClamp = 1e-12;

double stable_sigmoid(double z) {
    double p;
    if (z >= 0) {
        p = 1.0 / (1.0 + std::exp(-z));
    } else {
        const double e = std::exp(z);
        p = e / (1.0 + e);
    }
    return std::min(1.0 - kProbClamp, std::max(kProbClamp, p));
}
}  // namespace

Stage2Model make_stage2_model(int dim) {
    Stage2Model m;
    m.weights.assign(dim, 0.0);
    return m;
}

double sigmoid_forward(const Stage2Model& m, const std::vector<double>& x) {
    if (x.size() != m.weights.size())
        throw std::invalid_argument("sigmoid_forward: feature dimension mismatch");
    double z = m.bias;
    for (size_t j = 0; j < x.size(); ++j) z += m.weights[j] * x[j];
    return stable_sigmoid(z);
}

double splc_sample_loss(double p, int label, double tau) {
    if (p <= 0.0 || p >= 1.0)
        throw std::invalid_argument("splc_sample_loss: p must be in (0,1)");
    if (tau >= 1.0) throw std::invalid_argument("splc_sample_loss: tau must be < 1");
    if (label != 0 && label != 1)
        throw std::invalid_argument("splc_sample_loss: label must be 0 or 1");
    if (label == 1 && p > tau) return -std::log(p);
    return -std::log(1.0 - p);
}

Stage2Gradient splc_batch_gradient(const Stage2Model& m,
                                   const std::vector<const std::vector<double>*>& xs,
                                   const std::vector<int>& labels, double tau) {
    if (xs.empty()) throw std::invalid_argument("splc_batch_gradient: empty batch");
    if (xs.size() != labels.size())
        throw std::invalid_argument("splc_batch_gradient: size mismatch");
    Stage2Gradient g;
    g.d_weights.assign(m.weights.size(), 0.0);
    const double inv_n = 1.0 / static_cast<double>(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) {
        const auto& x = *xs[i];
        const double p = sigmoid_forward(m, x);
        // uncorrected positive: dL/dz = p-1; corrected positive and negative: p
        const double dz = (labels[i] == 1 && p > tau) ? (p - 1.0) : p;
        const double step = dz * inv_n;
        g.d_bias += step;
        for (size_t j = 0; j < x.size(); ++j) g.d_weights[j] += step * x[j];
    }
    return g;
}

void SplcConfig::validate() const {
    if (tau <= 0.0 || tau >= 1.0) throw std::invalid_argument("tau must be in (0,1)");
    if (warmup_epochs < 0) throw std::invalid_argument("warmup_epochs must be >= 0");
    if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (warmup_epochs >= epochs)
        throw std::invalid_argument("warmup_epochs must be < epochs");
    if (learning_rate <= 0) throw std::invalid_argument("learning_rate must be positive");
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (tau_schedule == TauSchedule::LinearRamp) {
        if (ramp_epochs < 1) throw std::invalid_argument("ramp_epochs must be >= 1");
        if (ramp_start <= 0.0 || ramp_start >= 1.0)
            throw std::invalid_argument("ramp_start must be in (0,1)");
    }
}

namespace {

double effective_tau(const SplcConfig& cfg, int epoch) {
    if (epoch < cfg.warmup_epochs) return 0.0;  // plain BCE
    if (cfg.tau_schedule == TauSchedule::Constant) return cfg.tau;
    const int since = epoch - cfg.warmup_epochs;
    if (since >= cfg.ramp_epochs - 1 || cfg.ramp_epochs == 1) return cfg.tau;
    const double frac = static_cast<double>(since) / (cfg.ramp_epochs - 1);
    return cfg.ramp_start + frac * (cfg.tau - cfg.ramp_start);
}

}  // namespace

Stage2TrainResult train_stage2(const Dataset& ds,
                               const std::vector<std::pair<std::int64_t, int>>& labels,
                               const SplcConfig& cfg) {
    cfg.validate();
    if (labels.empty()) throw std::invalid_argument("train_stage2: empty training set");

    std::unordered_map<std::int64_t, const CustomerRecord*> by_id;
    by_id.reserve(ds.customers.size());
    for (const auto& c : ds.customers) by_id[c.id] = &c;

    struct Sample {
        std::int64_t id;
        const std::vector<double>* x;
        int initial_label;
        int working_label;
    };
    std::vector<Sample> samples;
    samples.reserve(labels.size());
    int pos = 0, neg = 0;
    for (const auto& [id, lbl] : labels) {
        auto it = by_id.find(id);
        if (it == by_id.end())
            throw std::invalid_argument("train_stage2: unknown customer id " +
                                        std::to_string(id));
        samples.push_back({id, &it->second->features, lbl, lbl});
        (lbl == 1 ? pos : neg)++;
    }
    if (pos == 0 || neg == 0)
        throw std::invalid_argument("train_stage2: both labels must be present");
    std::sort(samples.begin(), samples.end(),
              [](const Sample& a, const Sample& b) { return a.id < b.id; });

    Stage2TrainResult res;
    res.model = make_stage2_model(ds.feature_dim);

    const size_t n = samples.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(cfg.seed);

    double tau_e = 0.0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        tau_e = effective_tau(cfg, epoch);
        // The correction is re-evaluated once per epoch against the current
        // model; a flipped positive can flip back. Evaluating it per batch
        // instead lets corrections compound within an epoch and drags the
        // model into the degenerate all-negative solution.
        if (!cfg.sticky && tau_e > 0.0) {
            for (auto& s : samples)
                if (s.initial_label == 1)
                    s.working_label =
                        sigmoid_forward(res.model, *s.x) > tau_e ? 1 : 0;
        }
        std::shuffle(order.begin(), order.end(), rng);
        for (size_t start = 0; start < n; start += cfg.batch_size) {
            const size_t end = std::min(n, start + cfg.batch_size);
            std::vector<const std::vector<double>*> xs;
            std::vector<int> ys;
            xs.reserve(end - start);
            ys.reserve(end - start);
            for (size_t k = start; k < end; ++k) {
                xs.push_back(samples[order[k]].x);
                ys.push_back(samples[order[k]].working_label);
            }
            // Within the epoch the branch assignment is frozen: the batch
            // gradient sees the epoch's working labels under plain BCE.
            const auto g = splc_batch_gradient(res.model, xs, ys, 0.0);
            for (size_t j = 0; j < res.model.weights.size(); ++j)
                res.model.weights[j] -= cfg.learning_rate * g.d_weights[j];
            res.model.bias -= cfg.learning_rate * g.d_bias;
        }

        double loss = 0;
        for (const auto& s : samples)
            loss += splc_sample_loss(sigmoid_forward(res.model, *s.x), s.working_label,
                                     tau_e);
        res.loss_history.push_back(loss / n);

        if (cfg.sticky && tau_e > 0.0) {
            for (auto& s : samples)
                if (s.working_label == 1 && sigmoid_forward(res.model, *s.x) <= tau_e)
                    s.working_label = 0;
        }
    }

    res.report.reserve(n);
    for (const auto& s : samples) {
        CorrectionEntry e;
        e.id = s.id;
        e.initial_label = s.initial_label;
        e.p = sigmoid_forward(res.model, *s.x);
        e.corrected = cfg.sticky ? (s.initial_label == 1 && s.working_label == 0)
                                 : (s.initial_label == 1 && e.p <= tau_e);
        res.report.push_back(e);
    }
    return res;
}

std::vector<std::pair<std::int64_t, double>> score_customers(
    const Stage2Model& m, const Dataset& ds, const std::vector<std::int64_t>& ids) {
    std::unordered_map<std::int64_t, const CustomerRecord*> by_id;
    by_id.reserve(ds.customers.size());
    for (const auto& c : ds.customers) by_id[c.id] = &c;

    std::vector<std::pair<std::int64_t, double>> out;
    out.reserve(ids.size());
    for (auto id : ids) {
        auto it = by_id.find(id);
        if (it == by_id.end())
            throw std::invalid_argument("score_customers: unknown customer id " +
                                        std::to_string(id));
        out.emplace_back(id, sigmoid_forward(m, it->second->features));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return out;
}

void save_stage2_model(const Stage2Model& m, const std::string& path) {
    std::ostringstream out;
    out << m.dim() << "\n";
    for (double v : m.weights) out << format_double(v) << "\n";
    out << format_double(m.bias) << "\n";
    write_file_atomic(path, out.str());
}

Stage2Model load_stage2_model(const std::string& path) {
    std::istringstream in(read_file(path));
    int dim = 0;
    if (!(in >> dim) || dim <= 0)
        throw std::runtime_error("corrupt stage-2 model file: " + path);
    Stage2Model m = make_stage2_model(dim);
    for (double& v : m.weights)
        if (!(in >> v)) throw std::runtime_error("corrupt stage-2 model file: " + path);
    if (!(in >> m.bias)) throw std::runtime_error("corrupt stage-2 model file: " + path);
    return m;
}

void write_correction_report_csv(const std::vector<CorrectionEntry>& report,
                                 const std::string& path) {
    std::ostringstream out;
    out << "id,initial_label,p,corrected\n";
    for (const auto& e : report)
        out << e.id << ',' << e.initial_label << ',' << format_double(e.p) << ','
            << (e.corrected ? 1 : 0) << "\n";
    write_file_atomic(path, out.str());
}

void write_scores_csv(const std::vector<std::pair<std::int64_t, double>>& scores,
                      const std::string& path) {
    std::ostringstream out;
    out << "id,score\n";
    for (const auto& [id, s] : scores) out << id << ',' << format_double(s) << "\n";
    write_file_atomic(path, out.str());
}

}  // namespace seg
