#include <cstdlib>

#include "doctest.h"
#include "hazscore/artifacts.hpp"
#include "hazscore/config.hpp"
#include "hazscore/pipeline.hpp"
#include "helpers.hpp"

using namespace hazscore;

namespace {

Json small_config(int n_loans = 1500) {
    return {
        {"paths",
         {{"loans", "data/loans.txt"}, {"performance", "data/perf.txt"}, {"macro_dir", "data/macro"}, {"out_dir", "out"}}},
        {"macro_series",
         Json::array({{{"name", "MORTGAGE30US"}},
                      {{"name", "UNRATENSA"}},
                      {{"name", "RCMFLBACTDPDPCT90P"}, {"frequency", "quarterly"}}})},
        {"seed", 5},
        {"synth", {{"n_loans", n_loans}}},
    };
}

}  // namespace

TEST_CASE("config defaults and path resolution") {
    const auto c = config_from_json(small_config(), "/base");
    CHECK(c.loans == std::filesystem::path("/base/data/loans.txt"));
    CHECK(c.out_dir == std::filesystem::path("/base/out"));
    CHECK(c.labeling.horizon == 36);
    CHECK(c.labeling.bad_threshold == 2);
    CHECK(c.train_fraction == 0.7);
    CHECK(c.cutoffs == std::vector<int>{600, 621, 640});
    CHECK(c.macro_series[2].frequency == Frequency::quarterly);
    CHECK(c.macro_series[0].file == "MORTGAGE30US.csv");
    CHECK(c.synth.has_value());
}

TEST_CASE("config validation failures") {
    auto doc = small_config();
    doc["train_fraction"] = 1.5;
    CHECK_THROWS_AS(config_from_json(doc), ConfigError);

    doc = small_config();
    doc["sampling"] = {{"unit", "loan"}};
    CHECK_THROWS_AS(config_from_json(doc), ConfigError);

    doc = small_config();
    doc["sampling"] = {{"bad_tiers", Json::array({Json::array({1, 10, 1.0}), Json::array({20, nullptr, 0.5})})}};
    CHECK_THROWS_AS(config_from_json(doc), ConfigError);

    doc = small_config();
    doc["labeling"] = {{"horizon", "long"}};
    CHECK_THROWS_AS(config_from_json(doc), ConfigError);

    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("config hash ignores threads and paths but not seed") {
    const auto a = config_from_json(small_config());
    auto doc = small_config();
    doc["threads"] = 8;
    doc["paths"]["out_dir"] = "elsewhere";
    CHECK(config_from_json(doc).hash() == a.hash());
    doc["seed"] = 6;
    CHECK(config_from_json(doc).hash() != a.hash());
}

TEST_CASE("config JSON round trip") {
    auto doc = small_config();
    doc["features"] = {{"knots", {{"loan_age", {6, 18}}}}, {"interaction", {{"mode", "fixed"}}}};
    doc["sampling"] = {{"unit", "snapshot_panel"}};
    const auto a = config_from_json(doc);
    CHECK(a.features.loan_age.knots == std::vector<double>{6, 18});
    CHECK(a.interaction_mode == InteractionMode::fixed);
    const auto b = config_from_json(a.to_json());
    CHECK(b.hash() == a.hash());
    CHECK(b.to_json() == a.to_json());
}

TEST_CASE("stage ordering errors") {
    test::TempDir dir;
    const auto cfg = config_from_json(small_config(), dir.path());
    CHECK_THROWS_WITH_AS(run_stage("fit", cfg), doctest::Contains("run features first"), StageError);
    CHECK_THROWS_WITH_AS(run_stage("counts", cfg), doctest::Contains("run ingest first"), StageError);
    CHECK_THROWS_WITH_AS(run_stage("ingest", cfg), doctest::Contains("not found"), StageError);
    CHECK_THROWS_AS(run_stage("polish", cfg), StageError);
}

TEST_CASE("invalid config fails before any work") {
    test::TempDir dir;
    auto cfg = config_from_json(small_config(), dir.path());
    cfg.train_fraction = 0.0;
    CHECK_THROWS_AS(run_stage("all", cfg), ConfigError);
    CHECK_FALSE(std::filesystem::exists(dir / "out"));
    CHECK_FALSE(std::filesystem::exists(dir / "data"));
}

TEST_CASE("staged run produces every artifact and a manifest") {
    test::TempDir dir;
    const auto cfg = config_from_json(small_config(), dir.path());
    for (const auto& stage : stage_names())
        if (stage != "all") run_stage(stage, cfg);
    const auto out = dir.path() / "out";
    for (const char* f : {files::manifest, files::coefficients, files::model, files::backtest_train, files::backtest_test,
                          files::band_table, files::cutoff, files::summary, files::metrics, files::sample_summary,
                          files::interaction_table, files::collinearity, files::wald_report})
        CHECK_MESSAGE(std::filesystem::exists(out / f), f);
    CHECK(std::filesystem::exists(out / files::bivariate_dir / "fico.csv"));
    CHECK(std::filesystem::exists(out / files::bivariate_dir / "orig_upb.csv"));

    const auto manifest = artifacts::read_json(out / files::manifest);
    CHECK(manifest["config_hash"] == cfg.hash());
    CHECK(manifest["seed"] == 5);
    CHECK(manifest["stages"]["ingest"]["histories"] == 1500);
    CHECK(manifest["stages"]["split"]["train_loans"] == 1050);
    CHECK(manifest["timings_ms"].contains("report"));

    const auto model = artifacts::model_from_json(artifacts::read_json(out / files::model));
    CHECK(model.coefficients.front().name == "Intercept");
    CHECK(model.coefficients.size() == cfg.features.names().size() + 1);

    const auto cutoff = artifacts::read_json(out / files::cutoff);
    CHECK(cutoff["cutoff_score"].get<int>() >= 300);
    CHECK(cutoff["cutoff_score"].get<int>() <= 850);
    CHECK(cutoff["auc"].get<double>() > 0.5);

    SUBCASE("a changed feature spec invalidates the fitted model") {
        auto spec = artifacts::read_json(out / files::feature_spec);
        spec["knots"]["cltv"] = Json::array({70});
        artifacts::write_json(out / files::feature_spec, spec);
        CHECK_THROWS_WITH_AS(run_stage("backtest", cfg), doctest::Contains("run fit again"), StageError);
    }
}

TEST_CASE("artifact round trips") {
    test::TempDir dir;
    const std::vector<LoanHistory> hs{test::history("A", {0, 0, 1}), test::history("B", {0, 0, 0, 0}, {2019, 5})};
    std::vector<LoanOrigination> loans;
    for (const auto& h : hs) loans.push_back(h.origination);
    artifacts::write_originations(dir / "o.csv", loans);
    const auto loans2 = artifacts::read_originations(dir / "o.csv");
    CHECK(loans2 == loans);
    artifacts::write_histories(dir / "h.csv", hs);
    CHECK(artifacts::read_histories(dir / "h.csv", loans2) == hs);
    const auto counts = monthly_counts(hs);
    artifacts::write_counts(dir / "c.csv", counts);
    CHECK(artifacts::read_counts(dir / "c.csv") == counts);
}

#ifdef HAZSCORE_CLI_PATH
TEST_CASE("command-line exit codes") {
    test::TempDir dir;
    test::write_file(dir / "config.json", small_config().dump());
    const std::string cli = HAZSCORE_CLI_PATH;
    const auto run = [&](const std::string& args) {
        const int status = std::system((cli + " " + args + " > " + (dir / "log.txt").string() + " 2>&1").c_str());
        return WEXITSTATUS(status);
    };
    CHECK(run("--config " + (dir / "config.json").string() + " fit") == 3);
    CHECK(test::read_file(dir / "log.txt").find("run features first") != std::string::npos);
    CHECK(run("--config " + (dir / "missing.json").string() + " fit") != 0);
    CHECK(run("--config " + (dir / "config.json").string()) != 0);
    test::write_file(dir / "bad.json", R"({"train_fraction": 2})");
    CHECK(run("--config " + (dir / "bad.json").string() + " ingest") == 2);
    CHECK(run("--config " + (dir / "config.json").string() + " --out " + (dir / "o2").string() + " --threads 2 synth") == 0);
    CHECK(std::filesystem::exists(dir / "o2" / "manifest.json"));
}
#endif
