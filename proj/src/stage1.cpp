#include "segpipe/stage1.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "segpipe/io.hpp"

namespace seg {

namespace {
constexpr double kProbClamp = 1e-12;

double clamp_prob(double p) {
    return std::min(1.0 - kProbClamp, std::max(kProbClamp, p));
}
}  // namespace

Stage1Model make_stage1_model(int dim) {
    Stage1Model m;
    m.dim = dim;
    m.weights.assign(static_cast<size_t>(kNumSegments) * dim, 0.0);
    return m;
}

std::array<double, kNumSegments> softmax_forward(const Stage1Model& m,
                                                 const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != m.dim)
        throw std::invalid_argument("softmax_forward: feature dimension mismatch");
    std::array<double, kNumSegments> logits;
    for (int c = 0; c < kNumSegments; ++c) {
        double z = m.bias[c];
        const double* wr = m.weights.data() + static_cast<size_t>(c) * m.dim;
        for (int j = 0; j < m.dim; ++j) z += wr[j] * x[j];
        logits[c] = z;
    }
    const double zmax = *std::max_element(logits.begin(), logits.end());
    std::array<double, kNumSegments> p;
    double sum = 0;
    for (int c = 0; c < kNumSegments; ++c) {
        p[c] = std::exp(logits[c] - zmax);
        sum += p[c];
    }
    for (int c = 0; c < kNumSegments; ++c) p[c] /= sum;
    return p;
}

double weighted_cce_loss(const std::vector<std::array<double, kNumSegments>>& probs,
                         const std::vector<SegmentLabel>& labels,
                         const std::array<double, kNumSegments>& w) {
    if (probs.empty()) throw std::invalid_argument("weighted_cce_loss: empty input");
    if (probs.size() != labels.size())
        throw std::invalid_argument("weighted_cce_loss: size mismatch");
    double loss = 0;
    for (size_t i = 0; i < probs.size(); ++i) {
        const int y = static_cast<int>(labels[i]);
        loss -= w[y] * std::log(clamp_prob(probs[i][y]));
    }
    return loss;
}

std::array<double, kNumSegments> class_weights_from_frequencies(
    const std::vector<SegmentLabel>& labels) {
    std::array<int, kNumSegments> counts = {0, 0, 0};
    for (auto s : labels) counts[static_cast<int>(s)]++;
    for (int c = 0; c < kNumSegments; ++c)
        if (counts[c] == 0)
            throw std::invalid_argument(
                std::string("class_weights_from_frequencies: class absent: ") +
                to_string(static_cast<SegmentLabel>(c)));
    const double n = static_cast<double>(labels.size());
    std::array<double, kNumSegments> w;
    for (int c = 0; c < kNumSegments; ++c) w[c] = n / (kNumSegments * counts[c]);
    return w;
}

Stage1Gradient stage1_batch_gradient(const Stage1Model& m,
                                     const std::vector<const std::vector<double>*>& xs,
                                     const std::vector<SegmentLabel>& labels,
                                     double l2) {
    if (xs.empty()) throw std::invalid_argument("stage1_batch_gradient: empty batch");
    Stage1Gradient g;
    g.d_weights.assign(m.weights.size(), 0.0);
    g.d_bias = {0, 0, 0};
    const double inv_n = 1.0 / static_cast<double>(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) {
        const auto& x = *xs[i];
        const auto p = softmax_forward(m, x);
        const int y = static_cast<int>(labels[i]);
        const double wy = m.class_weights[y];
        for (int c = 0; c < kNumSegments; ++c) {
            // d(-w_y log p_y)/dlogit_c = w_y * (p_c - [c==y])
            const double dz = wy * (p[c] - (c == y ? 1.0 : 0.0)) * inv_n;
            g.d_bias[c] += dz;
            double* gr = g.d_weights.data() + static_cast<size_t>(c) * m.dim;
            for (int j = 0; j < m.dim; ++j) gr[j] += dz * x[j];
        }
    }
    if (l2 > 0)
        for (size_t k = 0; k < m.weights.size(); ++k)
            g.d_weights[k] += l2 * m.weights[k];
    return g;
}

void Stage1TrainConfig::validate() const {
    if (learning_rate <= 0) throw std::invalid_argument("learning_rate must be positive");
    if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (l2 < 0) throw std::invalid_argument("l2 must be >= 0");
}

Stage1TrainResult train_stage1(const Dataset& ds, const Stage1TrainConfig& cfg) {
    cfg.validate();
    if (ds.customers.empty()) throw std::invalid_argument("train_stage1: empty dataset");

    std::vector<SegmentLabel> all_labels;
    all_labels.reserve(ds.customers.size());
    for (const auto& c : ds.customers) all_labels.push_back(c.segment);

    Stage1TrainResult res;
    res.model = make_stage1_model(ds.feature_dim);
    switch (cfg.weight_mode) {
        case WeightMode::Uniform:
            res.model.class_weights = {1, 1, 1};
            break;
        case WeightMode::InverseFrequency:
            res.model.class_weights = class_weights_from_frequencies(all_labels);
            break;
        case WeightMode::Explicit:
            res.model.class_weights = cfg.explicit_weights;
            break;
    }

    const size_t n = ds.customers.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(cfg.seed);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (size_t start = 0; start < n; start += cfg.batch_size) {
            const size_t end = std::min(n, start + cfg.batch_size);
            std::vector<const std::vector<double>*> xs;
            std::vector<SegmentLabel> ys;
            xs.reserve(end - start);
            ys.reserve(end - start);
            for (size_t k = start; k < end; ++k) {
                xs.push_back(&ds.customers[order[k]].features);
                ys.push_back(ds.customers[order[k]].segment);
            }
            const auto g = stage1_batch_gradient(res.model, xs, ys, cfg.l2);
            for (size_t k = 0; k < res.model.weights.size(); ++k)
                res.model.weights[k] -= cfg.learning_rate * g.d_weights[k];
            for (int c = 0; c < kNumSegments; ++c)
                res.model.bias[c] -= cfg.learning_rate * g.d_bias[c];
        }
        std::vector<std::array<double, kNumSegments>> probs;
        probs.reserve(n);
        for (const auto& c : ds.customers) probs.push_back(softmax_forward(res.model, c.features));
        res.loss_history.push_back(
            weighted_cce_loss(probs, all_labels, res.model.class_weights) / n);
    }
    return res;
}

std::vector<std::int64_t> filter_active(const Stage1Model& m, const Dataset& ds,
                                        FilterPolicy policy, double inactive_tau) {
    if (policy == FilterPolicy::InactiveProbBelow &&
        (inactive_tau <= 0.0 || inactive_tau >= 1.0))
        throw std::invalid_argument("filter_active: threshold must be in (0,1)");
    std::vector<std::int64_t> out;
    for (const auto& c : ds.customers) {
        const auto p = softmax_forward(m, c.features);
        if (policy == FilterPolicy::ArgmaxNotInactive) {
            int best = 0;
            for (int cls = 1; cls < kNumSegments; ++cls)
                if (p[cls] > p[best]) best = cls;  // ties keep the lower index
            if (best != static_cast<int>(SegmentLabel::Inactive)) out.push_back(c.id);
        } else {
            if (p[static_cast<int>(SegmentLabel::Inactive)] < inactive_tau)
                out.push_back(c.id);
        }
    }
    return out;
}

void save_stage1_model(const Stage1Model& m, const std::string& path) {
    std::ostringstream out;
    out << kNumSegments << ' ' << m.dim << "\n";
    for (double v : m.weights) out << format_double(v) << "\n";
    for (double v : m.bias) out << format_double(v) << "\n";
    for (double v : m.class_weights) out << format_double(v) << "\n";
    write_file_atomic(path, out.str());
}

Stage1Model load_stage1_model(const std::string& path) {
    std::istringstream in(read_file(path));
    int classes = 0, dim = 0;
    if (!(in >> classes >> dim) || classes != kNumSegments || dim <= 0)
        throw std::runtime_error("corrupt stage-1 model file: " + path);
    Stage1Model m = make_stage1_model(dim);
    for (double& v : m.weights)
        if (!(in >> v)) throw std::runtime_error("corrupt stage-1 model file: " + path);
    for (double& v : m.bias)
        if (!(in >> v)) throw std::runtime_error("corrupt stage-1 model file: " + path);
    for (double& v : m.class_weights)
        if (!(in >> v)) throw std::runtime_error("corrupt stage-1 model file: " + path);
    return m;
}

}  // namespace seg
