#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>

#include "segpipe/abtest.hpp"
#include "segpipe/config.hpp"
#include "segpipe/datagen.hpp"
#include "segpipe/domain.hpp"
#include "segpipe/evaluate.hpp"
#include "segpipe/io.hpp"
#include "segpipe/pipeline.hpp"
#include "segpipe/rfm.hpp"
#include "segpipe/stage1.hpp"
#include "segpipe/stage2.hpp"
#include "segpipe/workflows.hpp"

namespace {

seg::KeyValueConfig load_config(const std::string& path, long long seed_override,
                                bool has_seed) {
    seg::KeyValueConfig raw =
        path.empty() ? seg::KeyValueConfig{} : seg::KeyValueConfig::from_file(path);
    if (has_seed) {
        const std::string s = std::to_string(seed_override);
        raw.set("gen.seed", s);
        raw.set("stage1.seed", s);
        raw.set("stage2.seed", s);
        raw.set("abtest.seed", s);
    }
    seg::KeyValueConfig cfg = seg::resolve_run_config(raw);
    std::cout << "resolved config:\n" << cfg.render();
    return cfg;
}

seg::Dataset load_dataset(const seg::KeyValueConfig& cfg) {
    return seg::read_dataset_csv(cfg.require_string("data.customers"),
                                 cfg.require_string("data.transactions"));
}

std::vector<seg::RfmRule> load_rules(const seg::KeyValueConfig& cfg) {
    const std::string path = cfg.get_string("rfm.rules_file", "");
    return path.empty() ? seg::default_rfm_rules() : seg::rfm_rules_from_file(path);
}

int cmd_generate(const seg::KeyValueConfig& cfg) {
    const seg::GenConfig gen = seg::gen_config_from(cfg);
    const seg::Dataset ds = seg::generate_population(gen);
    const auto violations = seg::validate_dataset(ds);
    if (!violations.empty()) {
        std::cerr << "generated dataset failed validation: " << violations.front() << "\n";
        return 1;
    }
    seg::write_customers_csv(ds, cfg.require_string("data.customers"));
    seg::write_transactions_csv(ds, cfg.require_string("data.transactions"));
    std::cout << "generated " << ds.customers.size() << " customers, "
              << ds.transactions.size() << " transactions\n";
    return 0;
}

int cmd_train_stage1(const seg::KeyValueConfig& cfg) {
    const seg::Dataset ds = load_dataset(cfg);
    const auto res = seg::train_stage1(ds, seg::stage1_config_from(cfg));
    seg::save_stage1_model(res.model, cfg.require_string("model.stage1"));
    std::cout << "stage-1 trained, final epoch loss "
              << seg::format_double(res.loss_history.back()) << "\n";
    return 0;
}

int cmd_train_stage2(const seg::KeyValueConfig& cfg) {
    const seg::Dataset ds = load_dataset(cfg);
    const auto labels = seg::derive_stage2_initial_labels(ds);
    const auto res = seg::train_stage2(ds, labels, seg::splc_config_from(cfg));
    seg::save_stage2_model(res.model, cfg.require_string("model.stage2"));
    seg::write_correction_report_csv(res.report,
                                     cfg.require_string("output.correction_report"));
    long long flipped = 0;
    for (const auto& e : res.report) flipped += e.corrected ? 1 : 0;
    std::cout << "stage-2 trained on " << res.report.size() << " customers, "
              << flipped << " positives corrected, final epoch loss "
              << seg::format_double(res.loss_history.back()) << "\n";
    return 0;
}

int cmd_score(const seg::KeyValueConfig& cfg) {
    const seg::ScoreStore store = seg::run_batch_scoring(cfg);
    long long active = 0;
    for (const auto& r : store.rows) active += r.active ? 1 : 0;
    std::cout << "scored " << store.rows.size() << " customers, " << active
              << " active\n";
    return 0;
}

int cmd_export_targets(const seg::KeyValueConfig& cfg, std::optional<int> top_k,
                       std::optional<double> cut) {
    const seg::ScoreStore store =
        seg::read_score_store(cfg.require_string("output.score_store"));
    if (!top_k && !cut) {
        std::cerr << "export-targets: need --top-k or --score-cut\n";
        return 1;
    }
    const auto ids =
        seg::export_target_list(store, cfg.require_string("output.targets"), top_k, cut);
    std::cout << "exported " << ids.size() << " target ids\n";
    return 0;
}

int cmd_evaluate(const seg::KeyValueConfig& cfg) {
    const seg::Dataset ds = load_dataset(cfg);
    const seg::Stage2Model model = seg::load_stage2_model(cfg.require_string("model.stage2"));
    const auto rules = load_rules(cfg);
    const auto rows = seg::build_comparison(
        ds, model, cfg.get_double("evaluate.threshold", 0.5), rules);
    seg::write_comparison_csv(rows, cfg.require_string("output.comparison"));

    const auto rfm = seg::rfm_scores(ds, ds.horizon_days);
    std::vector<seg::RfmAssignment> assignments;
    assignments.reserve(rfm.size());
    for (const auto& s : rfm)
        assignments.push_back({s.customer_id, seg::rfm_segment(s, rules)});
    seg::write_rfm_csv(rfm, assignments, cfg.require_string("output.rfm"));

    for (const auto& row : rows)
        std::cout << row.method << ": balanced_accuracy "
                  << seg::format_double(row.report.balanced_accuracy) << "\n";
    return 0;
}

int cmd_gain_curve(const seg::KeyValueConfig& cfg) {
    const seg::Dataset ds = load_dataset(cfg);
    const seg::Stage2Model model = seg::load_stage2_model(cfg.require_string("model.stage2"));
    const seg::GainCurve curve = seg::build_gain_curve(ds, model);
    seg::write_gain_curve_csv(curve, cfg.require_string("output.gain_curve"));
    std::cout << "gain curve with " << curve.points.size() << " points written\n";
    return 0;
}

int cmd_abtest(const seg::KeyValueConfig& cfg) {
    const seg::Dataset ds = load_dataset(cfg);
    const seg::Stage2Model model = seg::load_stage2_model(cfg.require_string("model.stage2"));
    seg::ArmSizes sizes;
    sizes[seg::ChurnStatus::Never] = static_cast<int>(cfg.get_int("abtest.arm_never", 1000));
    sizes[seg::ChurnStatus::Churned] =
        static_cast<int>(cfg.get_int("abtest.arm_churned", 1000));
    const auto report = seg::run_ab_experiment(
        ds, model, sizes, static_cast<std::uint64_t>(cfg.get_int("abtest.seed", 7)));
    seg::write_abtest_csv(report, cfg.require_string("output.abtest"));
    std::cout << "conversion lift " << seg::format_double(report.conversion_lift)
              << ", p-value " << seg::format_double(report.p_value) << "\n";
    return 0;
}

int cmd_validate(const seg::KeyValueConfig& cfg) {
    const seg::Dataset ds = load_dataset(cfg);
    const auto violations = seg::validate_dataset(ds);
    for (const auto& v : violations) std::cout << v << "\n";
    std::cout << (violations.empty() ? "dataset valid" : "dataset invalid") << "\n";
    return violations.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-stage customer segmentation and campaign targeting pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    long long seed_override = 0;
    bool has_seed = false;
    app.add_option("--config", config_path, "path to key = value run config");
    auto* seed_opt = app.add_option("--seed", seed_override,
                                    "override every module seed with this value");

    std::optional<int> top_k;
    std::optional<double> score_cut;

    auto* generate = app.add_subcommand("generate", "generate a synthetic population");
    auto* train1 = app.add_subcommand("train-stage1", "train the behavior classifier");
    auto* train2 = app.add_subcommand("train-stage2", "train the intent classifier");
    auto* score = app.add_subcommand("score", "batch-score the population");
    auto* export_cmd = app.add_subcommand("export-targets", "export a target id list");
    int k_arg = -1;
    double cut_arg = -1;
    export_cmd->add_option("--top-k", k_arg, "export the k highest-scored customers");
    export_cmd->add_option("--score-cut", cut_arg, "export everyone above this score");
    auto* evaluate = app.add_subcommand("evaluate", "model vs RFM comparison table");
    auto* gain = app.add_subcommand("gain-curve", "cumulative gain curve CSV");
    auto* abtest = app.add_subcommand("abtest", "stratified A/B campaign simulation");
    auto* validate = app.add_subcommand("validate", "check dataset invariants");

    // --config/--seed live on the main app but may appear after the
    // subcommand name; let unmatched options fall through to the parent.
    for (auto* sub : app.get_subcommands(
             [](const CLI::App*) { return true; }))
        sub->fallthrough();

    CLI11_PARSE(app, argc, argv);
    has_seed = seed_opt->count() > 0;
    if (export_cmd->parsed()) {
        if (k_arg >= 0) top_k = k_arg;
        if (cut_arg >= 0) score_cut = cut_arg;
    }

    try {
        const seg::KeyValueConfig cfg = load_config(config_path, seed_override, has_seed);
        if (generate->parsed()) return cmd_generate(cfg);
        if (train1->parsed()) return cmd_train_stage1(cfg);
        if (train2->parsed()) return cmd_train_stage2(cfg);
        if (score->parsed()) return cmd_score(cfg);
        if (export_cmd->parsed()) return cmd_export_targets(cfg, top_k, score_cut);
        if (evaluate->parsed()) return cmd_evaluate(cfg);
        if (gain->parsed()) return cmd_gain_curve(cfg);
        if (abtest->parsed()) return cmd_abtest(cfg);
        if (validate->parsed()) return cmd_validate(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
