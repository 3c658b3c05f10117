#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "hazscore/config.hpp"
#include "hazscore/hazard_model.hpp"
#include "hazscore/pipeline.hpp"

namespace {

const char* describe(const std::string& stage) {
    if (stage == "synth") return "generate a synthetic portfolio at the configured input paths";
    if (stage == "ingest") return "parse, validate and label loan histories";
    if (stage == "counts") return "monthly good/bad observation counts";
    if (stage == "split") return "stratified train/test split by origination year";
    if (stage == "sample") return "backward weighted sample of the exploded train panel";
    if (stage == "features") return "assemble regressors, interaction table and diagnostics";
    if (stage == "fit") return "fit the weighted logistic hazard model";
    if (stage == "backtest") return "monthly predicted vs actual default rates";
    if (stage == "score") return "calibrate the score scale and score loans";
    if (stage == "cutoff") return "select the Youden cutoff on train loans";
    if (stage == "report") return "confusion matrices and metrics on the test set";
    return "run every stage in order";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hazscore: discrete-time hazard credit scorecard"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::string out_dir;
    app.add_option("-c,--config", config_path, "pipeline configuration (JSON)")->required()->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "override the configured seed");
    app.add_option("--threads", threads, "worker threads (0 = hardware concurrency)");
    app.add_option("--out", out_dir, "override the output directory");

    for (const auto& stage : hazscore::stage_names()) app.add_subcommand(stage, describe(stage));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    const std::string stage = app.get_subcommands().front()->get_name();
    try {
        auto config = hazscore::load_config(config_path);
        if (seed) config.seed = *seed;
        if (threads) config.threads = *threads;
        if (!out_dir.empty()) config.out_dir = out_dir;
        hazscore::run_stage(stage, config);
    } catch (const hazscore::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const hazscore::StageError& e) {
        std::cerr << stage << ": " << e.what() << '\n';
        return 3;
    } catch (const hazscore::DataError& e) {
        std::cerr << stage << ": data error: " << e.what() << '\n';
        return 4;
    } catch (const hazscore::FitError& e) {
        std::cerr << stage << ": fit failed: " << e.what() << '\n';
        return 5;
    } catch (const std::exception& e) {
        std::cerr << stage << ": " << e.what() << '\n';
        return 1;
    }
    return EXIT_SUCCESS;
}
