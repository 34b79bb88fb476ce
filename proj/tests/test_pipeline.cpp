#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "segpipe/config.hpp"
#include "segpipe/datagen.hpp"
#include "segpipe/io.hpp"
#include "segpipe/pipeline.hpp"
#include "segpipe/stage1.hpp"
#include "segpipe/stage2.hpp"

using namespace seg;
namespace fs = std::filesystem;

namespace {

struct PipelineFixture {
    fs::path dir;
    KeyValueConfig cfg;

    PipelineFixture() {
        dir = fs::path("pipeline_test_work");
        fs::create_directories(dir);
        cfg.set("data.customers", (dir / "customers.csv").string());
        cfg.set("data.transactions", (dir / "transactions.csv").string());
        cfg.set("model.stage1", (dir / "m1.txt").string());
        cfg.set("model.stage2", (dir / "m2.txt").string());
        cfg.set("output.score_store", (dir / "scores.csv").string());
        cfg.set("output.correction_report", (dir / "report.csv").string());

        GenConfig gen;
        gen.n_customers = 600;
        gen.seed = 44;
        const Dataset ds = generate_population(gen);
        write_customers_csv(ds, cfg.get_string("data.customers", ""));
        write_transactions_csv(ds, cfg.get_string("data.transactions", ""));

        Stage1TrainConfig c1;
        c1.epochs = 30;
        save_stage1_model(train_stage1(ds, c1).model, cfg.get_string("model.stage1", ""));
        SplcConfig c2;
        c2.epochs = 20;
        const auto res2 = train_stage2(ds, derive_stage2_initial_labels(ds), c2);
        save_stage2_model(res2.model, cfg.get_string("model.stage2", ""));
        write_correction_report_csv(res2.report,
                                    cfg.get_string("output.correction_report", ""));
    }
    ~PipelineFixture() { fs::remove_all(dir); }
};

}  // namespace

TEST_CASE("key=value config parsing with dotted keys and comments") {
    const auto cfg = KeyValueConfig::from_string(
        "# comment\nstage2.tau = 0.4\nrun.id = nightly # trailing\nflag = true\n");
    CHECK(cfg.get_double("stage2.tau", 0) == 0.4);
    CHECK(cfg.get_string("run.id", "") == "nightly");
    CHECK(cfg.get_bool("flag", false));
    CHECK(cfg.get_int("missing", 7) == 7);
    CHECK_THROWS_AS(cfg.get_int("run.id", 0), std::runtime_error);
    CHECK_THROWS_AS(KeyValueConfig::from_string("no equals sign"), std::runtime_error);
}

TEST_CASE("resolve_run_config materializes every default and keeps overrides") {
    KeyValueConfig raw;
    raw.set("stage2.tau", "0.33");
    raw.set("custom.extra", "kept");
    const auto cfg = resolve_run_config(raw);
    CHECK(cfg.get_double("stage2.tau", 0) == 0.33);
    CHECK(cfg.get_string("custom.extra", "") == "kept");
    CHECK(cfg.has("gen.n_customers"));
    CHECK(cfg.has("stage1.learning_rate"));
    CHECK(cfg.has("abtest.seed"));
    // the echo is reproducible input: parse it back and compare
    const auto echoed = KeyValueConfig::from_string(cfg.render());
    CHECK(echoed.entries() == cfg.entries());
}

TEST_CASE("batch scoring is idempotent and byte-identical") {
    PipelineFixture fx;
    run_batch_scoring(fx.cfg);
    const std::string first = read_file(fx.cfg.get_string("output.score_store", ""));
    run_batch_scoring(fx.cfg);
    const std::string second = read_file(fx.cfg.get_string("output.score_store", ""));
    CHECK(first == second);
    CHECK(!first.empty());
}

TEST_CASE("score store round-trips and satisfies the active/score invariant") {
    PipelineFixture fx;
    const ScoreStore store = run_batch_scoring(fx.cfg);
    for (const auto& r : store.rows) {
        CHECK(r.active == r.score.has_value());
        if (!r.active) CHECK(!r.corrected);
    }
    const ScoreStore back = read_score_store(fx.cfg.get_string("output.score_store", ""));
    REQUIRE(back.rows.size() == store.rows.size());
    for (size_t i = 0; i < store.rows.size(); ++i) {
        CHECK(back.rows[i].id == store.rows[i].id);
        CHECK(back.rows[i].active == store.rows[i].active);
        CHECK(back.rows[i].score == store.rows[i].score);
        CHECK(back.rows[i].scored_at == store.rows[i].scored_at);
    }
}

TEST_CASE("corrupted model file fails with the path and writes no store") {
    PipelineFixture fx;
    {
        std::ofstream bad(fx.cfg.get_string("model.stage2", ""));
        bad << "garbage\n";
    }
    fs::remove(fx.cfg.get_string("output.score_store", ""));
    try {
        run_batch_scoring(fx.cfg);
        FAIL("expected an exception");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("m2.txt") != std::string::npos);
    }
    CHECK(!fs::exists(fx.cfg.get_string("output.score_store", "")));
    CHECK(!fs::exists(fx.cfg.get_string("output.score_store", "") + ".tmp"));
}

TEST_CASE("missing dataset file fails naming the path") {
    KeyValueConfig cfg;
    cfg.set("data.customers", "does_not_exist.csv");
    cfg.set("data.transactions", "also_missing.csv");
    try {
        run_batch_scoring(cfg);
        FAIL("expected an exception");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("does_not_exist.csv") != std::string::npos);
    }
}

TEST_CASE("export_target_list: top-k, cut, and truncation") {
    PipelineFixture fx;
    const ScoreStore store = run_batch_scoring(fx.cfg);
    long long scored = 0;
    for (const auto& r : store.rows) scored += r.active ? 1 : 0;
    const std::string path = (fx.dir / "targets.txt").string();

    CHECK(export_target_list(store, path, 0, std::nullopt).empty());
    CHECK(read_file(path).empty());

    CHECK(export_target_list(store, path, std::nullopt, 1.0).empty());

    const auto all = export_target_list(store, path, static_cast<int>(scored), std::nullopt);
    CHECK(static_cast<long long>(all.size()) == scored);

    const auto truncated =
        export_target_list(store, path, static_cast<int>(scored) + 50, std::nullopt);
    CHECK(truncated == all);

    CHECK_THROWS_AS(export_target_list(store, path, std::nullopt, std::nullopt),
                    std::invalid_argument);

    // exported order is score-descending with id tie-break
    const auto top5 = export_target_list(store, path, 5, std::nullopt);
    std::vector<std::pair<std::int64_t, double>> ranked;
    for (const auto& r : store.rows)
        if (r.score) ranked.emplace_back(r.id, *r.score);
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    for (size_t i = 0; i < top5.size(); ++i) CHECK(top5[i] == ranked[i].first);
}

TEST_CASE("atomic writer leaves no temp file behind") {
    const std::string path = "atomic_check.txt";
    write_file_atomic(path, "payload");
    CHECK(read_file(path) == "payload");
    CHECK(!fs::exists(path + ".tmp"));
    fs::remove(path);
}
