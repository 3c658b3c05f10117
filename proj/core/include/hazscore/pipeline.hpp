#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hazscore/config.hpp"

namespace hazscore {

/// A stage could not run: missing predecessor output or invalid setup.
class StageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Stage names in pipeline order; "all" runs every stage in this order
/// (synth only when the config has a synth section).
const std::vector<std::string>& stage_names();

/// Runs one stage (or "all") against `config`. Each stage reads its
/// predecessors' files from config.out_dir, writes its own, and records row
/// counts and timings in out_dir/manifest.json.
void run_stage(std::string_view name, const PipelineConfig& config);

/// Well-known artifact file names inside the output directory.
namespace files {
inline constexpr const char* manifest = "manifest.json";
inline constexpr const char* origination = "origination.csv";
inline constexpr const char* histories = "histories.csv";
inline constexpr const char* exclusions = "exclusions.csv";
inline constexpr const char* rejections = "rejections.csv";
inline constexpr const char* portfolio_summary = "portfolio_summary.csv";
inline constexpr const char* monthly_counts = "monthly_counts.csv";
inline constexpr const char* split = "split.csv";
inline constexpr const char* split_summary = "split_summary.csv";
inline constexpr const char* train_counts = "train_counts.csv";
inline constexpr const char* sampled_panel = "sampled_panel.csv";
inline constexpr const char* test_panel = "test_panel.csv";
inline constexpr const char* sample_summary = "sample_summary.csv";
inline constexpr const char* feature_spec = "feature_spec.json";
inline constexpr const char* interaction_table = "interaction_table.csv";
inline constexpr const char* train_design = "train_design.csv";
inline constexpr const char* test_design = "test_design.csv";
inline constexpr const char* loan_design = "loan_design.csv";
inline constexpr const char* feature_exclusions = "feature_exclusions.csv";
inline constexpr const char* collinearity = "collinearity.csv";
inline constexpr const char* bivariate_dir = "bivariate";
inline constexpr const char* coefficients = "coefficients.csv";
inline constexpr const char* model = "model.json";
inline constexpr const char* wald_report = "wald_report.txt";
inline constexpr const char* backtest_train = "backtest_train.csv";
inline constexpr const char* backtest_test = "backtest_test.csv";
inline constexpr const char* backtest_summary = "backtest_summary.json";
inline constexpr const char* score_scale = "score_scale.json";
inline constexpr const char* band_table = "band_table.csv";
inline constexpr const char* loan_scores = "loan_scores.csv";
inline constexpr const char* roc = "roc.csv";
inline constexpr const char* cutoff = "cutoff.json";
inline constexpr const char* summary = "summary.json";
inline constexpr const char* metrics = "metrics.csv";
}  // namespace files

}  // namespace hazscore
