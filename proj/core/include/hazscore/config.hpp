#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hazscore/features.hpp"
#include "hazscore/hazard_model.hpp"
#include "hazscore/ingest.hpp"
#include "hazscore/panel.hpp"
#include "hazscore/scorecard_eval.hpp"
#include "hazscore/synthgen.hpp"

namespace hazscore {

using Json = nlohmann::json;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct MacroSource {
    std::string name;
    std::string file;  // relative to macro_dir
    Frequency frequency = Frequency::monthly;
};

enum class InteractionMode { fit, fixed };

struct PipelineConfig {
    std::filesystem::path loans;
    std::filesystem::path performance;
    std::filesystem::path macro_dir;
    std::filesystem::path out_dir = "out";

    LoanColumnMap loan_columns;
    PerformanceColumnMap performance_columns;
    std::vector<MacroSource> macro_series;

    LabelOptions labeling;
    int book_age_offset = 0;
    double train_fraction = 0.7;
    std::uint64_t seed = 20240901;
    unsigned threads = 0;

    SamplingRateTable sampling = SamplingRateTable::defaults();
    SamplingUnit sampling_unit = SamplingUnit::row;

    FeatureSpec features;
    InteractionMode interaction_mode = InteractionMode::fit;
    int n_fico_groups = 5;
    int n_upb_groups = 4;
    int bivariate_bins = 10;

    FitOptions fit;

    /// For range_calibrated mode with no explicit bounds, the bounds come
    /// from the min/max predicted log-odds on the train design.
    ScoreScale score_scale;
    bool score_bounds_from_train = true;
    int band_width = 50;
    std::vector<int> cutoffs{600, 621, 640};

    std::optional<GeneratorSpec> synth;

    /// Hex digest of the effective configuration, excluding thread count and
    /// output directory.
    std::string hash() const;
    Json to_json() const;
    /// Throws ConfigError on invalid values.
    void validate() const;
};

/// Parses a config document; relative paths resolve against `base_dir`.
PipelineConfig config_from_json(const Json& doc, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);

Json to_json(const FeatureSpec& spec);
FeatureSpec feature_spec_from_json(const Json& doc);
Json to_json(const SamplingRateTable& table);
SamplingRateTable sampling_table_from_json(const Json& doc);
Json to_json(const ScoreScale& scale);
ScoreScale score_scale_from_json(const Json& doc);
Json to_json(const GeneratorSpec& spec);
GeneratorSpec generator_spec_from_json(const Json& doc);

std::string hex_digest(std::string_view text);

}  // namespace hazscore
