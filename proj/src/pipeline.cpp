#include "segpipe/pipeline.hpp"

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "segpipe/io.hpp"

namespace seg {

void write_score_store(const ScoreStore& store, const std::string& path) {
    std::ostringstream out;
    out << "id,p_engaged,p_unengaged,p_inactive,active,score,corrected,scored_at\n";
    for (const auto& r : store.rows) {
        out << r.id;
        for (double p : r.stage1_probs) out << ',' << format_double(p);
        out << ',' << (r.active ? 1 : 0) << ','
            << (r.score ? format_double(*r.score) : "") << ',' << (r.corrected ? 1 : 0)
            << ',' << r.scored_at << "\n";
    }
    write_file_atomic(path, out.str());
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace

ScoreStore read_score_store(const std::string& path) {
    std::istringstream in(read_file(path));
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty score store: " + path);
    ScoreStore store;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_line(line);
        if (f.size() != 8) throw std::runtime_error("bad score store row in " + path);
        ScoreRow r;
        r.id = std::strtoll(f[0].c_str(), nullptr, 10);
        for (int c = 0; c < kNumSegments; ++c)
            r.stage1_probs[c] = std::strtod(f[1 + c].c_str(), nullptr);
        r.active = f[4] == "1";
        if (!f[5].empty()) r.score = std::strtod(f[5].c_str(), nullptr);
        r.corrected = f[6] == "1";
        r.scored_at = f[7];
        store.rows.push_back(std::move(r));
    }
    return store;
}

KeyValueConfig resolve_run_config(const KeyValueConfig& cfg) {
    KeyValueConfig out;
    auto def = [&](const std::string& key, const std::string& value) {
        out.set(key, cfg.get_string(key, value));
    };
    def("run.id", "run0");
    def("data.customers", "customers.csv");
    def("data.transactions", "transactions.csv");
    def("model.stage1", "stage1_model.txt");
    def("model.stage2", "stage2_model.txt");
    def("output.score_store", "score_store.csv");
    def("output.targets", "targets.txt");
    def("output.correction_report", "correction_report.csv");
    def("output.comparison", "comparison.csv");
    def("output.gain_curve", "gain_curve.csv");
    def("output.abtest", "abtest.csv");
    def("output.rfm", "rfm.csv");
    def("gen.n_customers", "10000");
    def("gen.feature_dim", "16");
    def("gen.mix_prompted_engaged", "0.25");
    def("gen.mix_organic_engaged", "0.25");
    def("gen.mix_organic_unengaged", "0.25");
    def("gen.mix_inactive", "0.25");
    def("gen.feature_separation", "2.0");
    def("gen.noise_scale", "1.0");
    def("gen.exposure_rate", "0.7");
    def("gen.churn_rate", "0.4");
    def("gen.horizon_days", "365");
    def("gen.seed", "42");
    def("stage1.learning_rate", "0.1");
    def("stage1.epochs", "100");
    def("stage1.batch_size", "64");
    def("stage1.seed", "1");
    def("stage1.weight_mode", "inverse_frequency");
    def("stage1.l2", "0");
    def("stage2.tau", "0.5");
    def("stage2.warmup_epochs", "5");
    def("stage2.epochs", "60");
    def("stage2.learning_rate", "0.5");
    def("stage2.batch_size", "64");
    def("stage2.seed", "2");
    def("stage2.tau_schedule", "constant");
    def("stage2.ramp_start", "0.05");
    def("stage2.ramp_epochs", "10");
    def("stage2.sticky", "false");
    def("filter.policy", "argmax");
    def("filter.tau", "0.5");
    def("rfm.rules_file", "");
    def("evaluate.threshold", "0.5");
    def("abtest.arm_never", "1000");
    def("abtest.arm_churned", "1000");
    def("abtest.seed", "7");
    // keep any extra user keys so the echo is complete
    for (const auto& [k, v] : cfg.entries())
        if (!out.has(k)) out.set(k, v);
    return out;
}

GenConfig gen_config_from(const KeyValueConfig& cfg) {
    GenConfig g;
    g.n_customers = static_cast<int>(cfg.get_int("gen.n_customers", g.n_customers));
    g.feature_dim = static_cast<int>(cfg.get_int("gen.feature_dim", g.feature_dim));
    g.archetype_mix[0] = cfg.get_double("gen.mix_prompted_engaged", g.archetype_mix[0]);
    g.archetype_mix[1] = cfg.get_double("gen.mix_organic_engaged", g.archetype_mix[1]);
    g.archetype_mix[2] = cfg.get_double("gen.mix_organic_unengaged", g.archetype_mix[2]);
    g.archetype_mix[3] = cfg.get_double("gen.mix_inactive", g.archetype_mix[3]);
    g.feature_separation = cfg.get_double("gen.feature_separation", g.feature_separation);
    g.noise_scale = cfg.get_double("gen.noise_scale", g.noise_scale);
    g.exposure_rate = cfg.get_double("gen.exposure_rate", g.exposure_rate);
    g.churn_rate = cfg.get_double("gen.churn_rate", g.churn_rate);
    g.horizon_days = static_cast<int>(cfg.get_int("gen.horizon_days", g.horizon_days));
    g.seed = static_cast<std::uint64_t>(cfg.get_int("gen.seed", 42));
    g.validate();
    return g;
}

Stage1TrainConfig stage1_config_from(const KeyValueConfig& cfg) {
    Stage1TrainConfig c;
    c.learning_rate = cfg.get_double("stage1.learning_rate", c.learning_rate);
    c.epochs = static_cast<int>(cfg.get_int("stage1.epochs", c.epochs));
    c.batch_size = static_cast<int>(cfg.get_int("stage1.batch_size", c.batch_size));
    c.seed = static_cast<std::uint64_t>(cfg.get_int("stage1.seed", 1));
    c.l2 = cfg.get_double("stage1.l2", c.l2);
    const std::string mode = cfg.get_string("stage1.weight_mode", "inverse_frequency");
    if (mode == "uniform") {
        c.weight_mode = WeightMode::Uniform;
    } else if (mode == "inverse_frequency") {
        c.weight_mode = WeightMode::InverseFrequency;
    } else if (mode == "explicit") {
        c.weight_mode = WeightMode::Explicit;
        c.explicit_weights[0] = cfg.get_double("stage1.weight_engaged", 1.0);
        c.explicit_weights[1] = cfg.get_double("stage1.weight_unengaged", 1.0);
        c.explicit_weights[2] = cfg.get_double("stage1.weight_inactive", 1.0);
    } else {
        throw std::runtime_error("unknown stage1.weight_mode: " + mode);
    }
    c.validate();
    return c;
}

SplcConfig splc_config_from(const KeyValueConfig& cfg) {
    SplcConfig c;
    c.tau = cfg.get_double("stage2.tau", c.tau);
    c.warmup_epochs = static_cast<int>(cfg.get_int("stage2.warmup_epochs", c.warmup_epochs));
    c.epochs = static_cast<int>(cfg.get_int("stage2.epochs", c.epochs));
    c.learning_rate = cfg.get_double("stage2.learning_rate", c.learning_rate);
    c.batch_size = static_cast<int>(cfg.get_int("stage2.batch_size", c.batch_size));
    c.seed = static_cast<std::uint64_t>(cfg.get_int("stage2.seed", 2));
    const std::string sched = cfg.get_string("stage2.tau_schedule", "constant");
    if (sched == "constant") {
        c.tau_schedule = TauSchedule::Constant;
    } else if (sched == "linear_ramp") {
        c.tau_schedule = TauSchedule::LinearRamp;
    } else {
        throw std::runtime_error("unknown stage2.tau_schedule: " + sched);
    }
    c.ramp_start = cfg.get_double("stage2.ramp_start", c.ramp_start);
    c.ramp_epochs = static_cast<int>(cfg.get_int("stage2.ramp_epochs", c.ramp_epochs));
    c.sticky = cfg.get_bool("stage2.sticky", c.sticky);
    c.validate();
    return c;
}

ScoreStore run_batch_scoring(const KeyValueConfig& raw) {
    const KeyValueConfig cfg = resolve_run_config(raw);
    const Dataset ds = read_dataset_csv(cfg.require_string("data.customers"),
                                        cfg.require_string("data.transactions"));
    const Stage1Model m1 = load_stage1_model(cfg.require_string("model.stage1"));
    const Stage2Model m2 = load_stage2_model(cfg.require_string("model.stage2"));
    if (m1.dim != ds.feature_dim || m2.dim() != ds.feature_dim)
        throw std::runtime_error("model dimension does not match dataset");

    const std::string policy = cfg.get_string("filter.policy", "argmax");
    const double tau1 = cfg.get_double("filter.tau", 0.5);

    // corrected flags come from the training-time report, if present
    std::unordered_set<std::int64_t> corrected;
    const std::string report_path = cfg.get_string("output.correction_report", "");
    if (!report_path.empty()) {
        try {
            std::istringstream in(read_file(report_path));
            std::string line;
            std::getline(in, line);
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                const auto f = split_line(line);
                if (f.size() == 4 && f[3] == "1")
                    corrected.insert(std::strtoll(f[0].c_str(), nullptr, 10));
            }
        } catch (const std::exception&) {
            // no report yet; corrected flags stay false
        }
    }

    ScoreStore store;
    store.rows.reserve(ds.customers.size());
    const std::string run_id = cfg.get_string("run.id", "run0");
    for (const auto& c : ds.customers) {
        ScoreRow r;
        r.id = c.id;
        r.stage1_probs = softmax_forward(m1, c.features);
        if (policy == "argmax") {
            int best = 0;
            for (int cls = 1; cls < kNumSegments; ++cls)
                if (r.stage1_probs[cls] > r.stage1_probs[best]) best = cls;
            r.active = best != static_cast<int>(SegmentLabel::Inactive);
        } else if (policy == "threshold") {
            r.active = r.stage1_probs[static_cast<int>(SegmentLabel::Inactive)] < tau1;
        } else {
            throw std::runtime_error("unknown filter.policy: " + policy);
        }
        if (r.active) {
            r.score = sigmoid_forward(m2, c.features);
            r.corrected = corrected.count(c.id) > 0;
        }
        r.scored_at = run_id;
        store.rows.push_back(std::move(r));
    }
    std::sort(store.rows.begin(), store.rows.end(),
              [](const ScoreRow& a, const ScoreRow& b) { return a.id < b.id; });
    write_score_store(store, cfg.require_string("output.score_store"));
    return store;
}

std::vector<std::int64_t> export_target_list(const ScoreStore& store,
                                             const std::string& path,
                                             std::optional<int> top_k,
                                             std::optional<double> score_cut) {
    std::vector<std::pair<std::int64_t, double>> scored;
    for (const auto& r : store.rows)
        if (r.active && r.score) scored.emplace_back(r.id, *r.score);
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    std::vector<std::int64_t> ids;
    if (top_k) {
        if (*top_k > static_cast<int>(scored.size()))
            std::cerr << "warning: requested " << *top_k << " targets, only "
                      << scored.size() << " scored customers available\n";
        const int k = std::min<int>(*top_k, static_cast<int>(scored.size()));
        for (int i = 0; i < k; ++i) ids.push_back(scored[i].first);
    } else if (score_cut) {
        for (const auto& [id, s] : scored)
            if (s > *score_cut) ids.push_back(id);
    } else {
        throw std::invalid_argument("export_target_list: need top_k or score_cut");
    }

    std::ostringstream out;
    for (auto id : ids) out << id << "\n";
    write_file_atomic(path, out.str());
    return ids;
}

}  // namespace seg
