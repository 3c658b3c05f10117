#include "hazscore/config.hpp"

#include <cstdio>
#include <fstream>

#include "hazscore/random.hpp"

namespace hazscore {

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    if (p.empty()) return {};
    std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

char delimiter_from(const Json& j, char fallback) {
    if (!j.contains("delimiter")) return fallback;
    const auto s = j.at("delimiter").get<std::string>();
    if (s == "\\t" || s == "tab") return '\t';
    if (s.size() != 1) throw ConfigError("delimiter must be a single character");
    return s[0];
}

Json tiers_json(const std::vector<SamplingTier>& tiers) {
    Json out = Json::array();
    for (const auto& t : tiers) out.push_back(Json::array({t.lo, t.hi > 0 ? Json(t.hi) : Json(nullptr), t.probability}));
    return out;
}

std::vector<SamplingTier> tiers_from(const Json& arr) {
    std::vector<SamplingTier> out;
    for (const auto& t : arr) {
        if (!t.is_array() || t.size() != 3) throw ConfigError("sampling tier must be [lo, hi|null, probability]");
        SamplingTier tier;
        tier.lo = t[0].get<std::int64_t>();
        tier.hi = t[1].is_null() ? 0 : t[1].get<std::int64_t>();
        tier.probability = t[2].get<double>();
        out.push_back(tier);
    }
    return out;
}

Json dist_json(const TruncatedNormal& d) { return {{"mean", d.mean}, {"sd", d.sd}, {"lo", d.lo}, {"hi", d.hi}}; }

TruncatedNormal dist_from(const Json& j, TruncatedNormal d) {
    d.mean = j.value("mean", d.mean);
    d.sd = j.value("sd", d.sd);
    d.lo = j.value("lo", d.lo);
    d.hi = j.value("hi", d.hi);
    return d;
}

}  // namespace

std::string hex_digest(std::string_view text) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(text)));
    return buf;
}

Json to_json(const FeatureSpec& spec) {
    Json macros = Json::array();
    for (const auto& m : spec.macros)
        macros.push_back({{"series", m.series}, {"transform", std::string(to_string(m.transform))}, {"lag_months", m.lag_months}});
    return {
        {"knots", {{"loan_age", spec.loan_age.knots}, {"snapshot_mob", spec.snapshot_mob.knots}, {"cltv", spec.cltv.knots}}},
        {"interaction",
         {{"edges", spec.interaction.upb_band_edges},
          {"multipliers", spec.interaction.band_multipliers},
          {"slopes", spec.interaction.slopes},
          {"average_slope", spec.interaction.average_slope}}},
        {"macros", macros},
        {"market_rate_series", spec.market_rate_series},
        {"sato_sign", spec.sato_sign == SatoSign::above_market ? "above_market" : "below_market"},
        {"regressors", spec.names()},
    };
}

FeatureSpec feature_spec_from_json(const Json& doc) {
    FeatureSpec spec;
    if (doc.contains("knots")) {
        const auto& k = doc.at("knots");
        if (k.contains("loan_age")) spec.loan_age.knots = k.at("loan_age").get<std::vector<double>>();
        if (k.contains("snapshot_mob")) spec.snapshot_mob.knots = k.at("snapshot_mob").get<std::vector<double>>();
        if (k.contains("cltv")) spec.cltv.knots = k.at("cltv").get<std::vector<double>>();
    }
    if (doc.contains("interaction")) {
        const auto& i = doc.at("interaction");
        if (i.contains("edges")) spec.interaction.upb_band_edges = i.at("edges").get<std::vector<double>>();
        if (i.contains("multipliers")) spec.interaction.band_multipliers = i.at("multipliers").get<std::vector<double>>();
        if (i.contains("slopes")) spec.interaction.slopes = i.at("slopes").get<std::vector<double>>();
        spec.interaction.average_slope = i.value("average_slope", spec.interaction.average_slope);
    }
    if (doc.contains("macros")) {
        spec.macros.clear();
        for (const auto& m : doc.at("macros"))
            spec.macros.push_back({m.at("series").get<std::string>(),
                                   parse_macro_transform(m.at("transform").get<std::string>()), m.value("lag_months", 0)});
    }
    spec.market_rate_series = doc.value("market_rate_series", spec.market_rate_series);
    const auto sign = doc.value("sato_sign", std::string("above_market"));
    if (sign == "above_market")
        spec.sato_sign = SatoSign::above_market;
    else if (sign == "below_market")
        spec.sato_sign = SatoSign::below_market;
    else
        throw ConfigError("sato_sign must be above_market or below_market");
    spec.validate();
    return spec;
}

Json to_json(const SamplingRateTable& table) {
    return {{"bad_tiers", tiers_json(table.bad_tiers)}, {"good_tiers", tiers_json(table.good_tiers)}};
}

SamplingRateTable sampling_table_from_json(const Json& doc) {
    auto table = SamplingRateTable::defaults();
    if (doc.contains("bad_tiers")) table.bad_tiers = tiers_from(doc.at("bad_tiers"));
    if (doc.contains("good_tiers")) table.good_tiers = tiers_from(doc.at("good_tiers"));
    table.validate();
    return table;
}

Json to_json(const ScoreScale& s) {
    return {{"mode", s.mode == ScoreMode::range_calibrated ? "range_calibrated" : "anchor_based"},
            {"logodds_lo", s.logodds_lo},
            {"logodds_hi", s.logodds_hi},
            {"anchor_score", s.anchor_score},
            {"anchor_odds", s.anchor_odds},
            {"points_to_double_odds", s.points_to_double_odds},
            {"min_score", s.min_score},
            {"max_score", s.max_score}};
}

ScoreScale score_scale_from_json(const Json& doc) {
    ScoreScale s;
    const auto mode = doc.value("mode", std::string("range_calibrated"));
    if (mode == "range_calibrated")
        s.mode = ScoreMode::range_calibrated;
    else if (mode == "anchor_based")
        s.mode = ScoreMode::anchor_based;
    else
        throw ConfigError("score mode must be range_calibrated or anchor_based");
    s.logodds_lo = doc.value("logodds_lo", s.logodds_lo);
    s.logodds_hi = doc.value("logodds_hi", s.logodds_hi);
    s.anchor_score = doc.value("anchor_score", s.anchor_score);
    s.anchor_odds = doc.value("anchor_odds", s.anchor_odds);
    s.points_to_double_odds = doc.value("points_to_double_odds", s.points_to_double_odds);
    s.min_score = doc.value("min_score", s.min_score);
    s.max_score = doc.value("max_score", s.max_score);
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return s;
}

Json to_json(const GeneratorSpec& spec) {
    Json paths = Json::array();
    for (const auto& p : spec.macro_paths)
        paths.push_back({{"name", p.name},
                         {"frequency", std::string(to_string(p.frequency))},
                         {"level", p.level},
                         {"trend", p.trend},
                         {"amplitude", p.amplitude},
                         {"period_months", p.period_months},
                         {"noise_sd", p.noise_sd}});
    return {{"n_loans", spec.n_loans},
            {"orig_first", spec.orig_first.to_string()},
            {"orig_last", spec.orig_last.to_string()},
            {"data_end", spec.data_end.to_string()},
            {"performance_lag", spec.performance_lag},
            {"fico", dist_json(spec.fico)},
            {"dti", dist_json(spec.dti)},
            {"cltv", dist_json(spec.cltv)},
            {"orig_upb", dist_json(spec.orig_upb)},
            {"rate_spread", dist_json(spec.rate_spread)},
            {"upb_rounding", spec.upb_rounding},
            {"rate_rounding", spec.rate_rounding},
            {"features", to_json(spec.features)},
            {"intercept", spec.intercept},
            {"coefficients", spec.coefficients},
            {"macro_paths", paths},
            {"horizon", spec.horizon},
            {"bad_threshold", spec.bad_threshold},
            {"book_age_offset", spec.book_age_offset},
            {"seed", spec.seed}};
}

GeneratorSpec generator_spec_from_json(const Json& doc) {
    auto spec = GeneratorSpec::standard();
    spec.n_loans = doc.value("n_loans", spec.n_loans);
    if (doc.contains("orig_first")) spec.orig_first = Month::parse(doc.at("orig_first").get<std::string>());
    if (doc.contains("orig_last")) spec.orig_last = Month::parse(doc.at("orig_last").get<std::string>());
    if (doc.contains("data_end")) spec.data_end = Month::parse(doc.at("data_end").get<std::string>());
    spec.performance_lag = doc.value("performance_lag", spec.performance_lag);
    if (doc.contains("fico")) spec.fico = dist_from(doc.at("fico"), spec.fico);
    if (doc.contains("dti")) spec.dti = dist_from(doc.at("dti"), spec.dti);
    if (doc.contains("cltv")) spec.cltv = dist_from(doc.at("cltv"), spec.cltv);
    if (doc.contains("orig_upb")) spec.orig_upb = dist_from(doc.at("orig_upb"), spec.orig_upb);
    if (doc.contains("rate_spread")) spec.rate_spread = dist_from(doc.at("rate_spread"), spec.rate_spread);
    spec.upb_rounding = doc.value("upb_rounding", spec.upb_rounding);
    spec.rate_rounding = doc.value("rate_rounding", spec.rate_rounding);
    if (doc.contains("features")) spec.features = feature_spec_from_json(doc.at("features"));
    spec.intercept = doc.value("intercept", spec.intercept);
    if (doc.contains("coefficients")) spec.coefficients = doc.at("coefficients").get<std::map<std::string, double>>();
    if (doc.contains("macro_paths")) {
        spec.macro_paths.clear();
        for (const auto& p : doc.at("macro_paths")) {
            MacroPath path;
            path.name = p.at("name").get<std::string>();
            path.frequency = parse_frequency(p.value("frequency", std::string("monthly")));
            path.level = p.value("level", 0.0);
            path.trend = p.value("trend", 0.0);
            path.amplitude = p.value("amplitude", 0.0);
            path.period_months = p.value("period_months", 48.0);
            path.noise_sd = p.value("noise_sd", 0.0);
            spec.macro_paths.push_back(path);
        }
    }
    spec.horizon = doc.value("horizon", spec.horizon);
    spec.bad_threshold = doc.value("bad_threshold", spec.bad_threshold);
    spec.book_age_offset = doc.value("book_age_offset", spec.book_age_offset);
    spec.seed = doc.value("seed", spec.seed);
    return spec;
}

PipelineConfig config_from_json(const Json& doc, const std::filesystem::path& base_dir) {
    PipelineConfig c;
    try {
        if (doc.contains("paths")) {
            const auto& p = doc.at("paths");
            c.loans = resolve(base_dir, p.value("loans", std::string()));
            c.performance = resolve(base_dir, p.value("performance", std::string()));
            c.macro_dir = resolve(base_dir, p.value("macro_dir", std::string()));
            c.out_dir = resolve(base_dir, p.value("out_dir", std::string("out")));
        }
        if (doc.contains("loan_columns")) {
            const auto& j = doc.at("loan_columns");
            auto& m = c.loan_columns;
            m.delimiter = delimiter_from(j, m.delimiter);
            m.has_header = j.value("header", m.has_header);
            m.loan_id = j.value("loan_id", m.loan_id);
            m.orig_month = j.value("orig_month", m.orig_month);
            m.fico = j.value("fico", m.fico);
            m.dti = j.value("dti", m.dti);
            m.cltv = j.value("cltv", m.cltv);
            m.orig_upb = j.value("orig_upb", m.orig_upb);
            m.orig_int_rt = j.value("orig_int_rt", m.orig_int_rt);
        }
        if (doc.contains("performance_columns")) {
            const auto& j = doc.at("performance_columns");
            auto& m = c.performance_columns;
            m.delimiter = delimiter_from(j, m.delimiter);
            m.has_header = j.value("header", m.has_header);
            m.loan_id = j.value("loan_id", m.loan_id);
            m.month = j.value("month", m.month);
            m.dlq_status = j.value("dlq_status", m.dlq_status);
        }
        if (doc.contains("macro_series")) {
            for (const auto& m : doc.at("macro_series")) {
                MacroSource src;
                src.name = m.at("name").get<std::string>();
                src.file = m.value("file", src.name + ".csv");
                src.frequency = parse_frequency(m.value("frequency", std::string("monthly")));
                c.macro_series.push_back(src);
            }
        }
        if (doc.contains("labeling")) {
            const auto& j = doc.at("labeling");
            c.labeling.horizon = j.value("horizon", c.labeling.horizon);
            c.labeling.bad_threshold = j.value("bad_threshold", c.labeling.bad_threshold);
            c.labeling.clock_offset = j.value("clock_offset", c.labeling.clock_offset);
        }
        c.book_age_offset = doc.value("book_age_offset", c.book_age_offset);
        c.train_fraction = doc.value("train_fraction", c.train_fraction);
        c.seed = doc.value("seed", c.seed);
        c.threads = doc.value("threads", c.threads);
        if (doc.contains("sampling")) {
            const auto& j = doc.at("sampling");
            c.sampling = sampling_table_from_json(j);
            const auto unit = j.value("unit", std::string("row"));
            if (unit == "row")
                c.sampling_unit = SamplingUnit::row;
            else if (unit == "snapshot_panel")
                c.sampling_unit = SamplingUnit::snapshot_panel;
            else
                throw ConfigError("sampling.unit must be row or snapshot_panel");
        }
        if (doc.contains("features")) {
            const auto& j = doc.at("features");
            c.features = feature_spec_from_json(j);
            if (j.contains("interaction")) {
                const auto& i = j.at("interaction");
                const auto mode = i.value("mode", std::string("fit"));
                if (mode == "fit")
                    c.interaction_mode = InteractionMode::fit;
                else if (mode == "fixed")
                    c.interaction_mode = InteractionMode::fixed;
                else
                    throw ConfigError("features.interaction.mode must be fit or fixed");
                c.n_fico_groups = i.value("n_fico_groups", c.n_fico_groups);
                c.n_upb_groups = i.value("n_upb_groups", c.n_upb_groups);
            }
            c.bivariate_bins = j.value("bivariate_bins", c.bivariate_bins);
        }
        if (doc.contains("fit")) {
            const auto& j = doc.at("fit");
            c.fit.tol = j.value("tol", c.fit.tol);
            c.fit.max_iter = j.value("max_iter", c.fit.max_iter);
            c.fit.ridge = j.value("ridge", c.fit.ridge);
        }
        if (doc.contains("score")) {
            const auto& j = doc.at("score");
            c.score_scale = score_scale_from_json(j);
            c.score_bounds_from_train =
                j.value("bounds_from_train", c.score_scale.mode == ScoreMode::range_calibrated &&
                                                 !(j.contains("logodds_lo") && j.contains("logodds_hi")));
            c.band_width = j.value("band_width", c.band_width);
        }
        if (doc.contains("cutoffs")) c.cutoffs = doc.at("cutoffs").get<std::vector<int>>();
        if (doc.contains("synth")) c.synth = generator_spec_from_json(doc.at("synth"));
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const Json::exception& e) {
        throw ConfigError("config '" + path.string() + "': " + e.what());
    }
    return config_from_json(doc, path.parent_path());
}

void PipelineConfig::validate() const {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ConfigError("train_fraction must lie in (0, 1)");
    if (labeling.horizon - labeling.clock_offset < 1) throw ConfigError("horizon minus clock_offset must be >= 1");
    if (labeling.bad_threshold < 1) throw ConfigError("bad_threshold must be >= 1");
    if (book_age_offset < 0) throw ConfigError("book_age_offset must be >= 0");
    if (bivariate_bins < 2) throw ConfigError("bivariate_bins must be >= 2");
    if (n_fico_groups < 2 || n_upb_groups < 1) throw ConfigError("invalid interaction group counts");
    if (band_width < 1) throw ConfigError("band_width must be >= 1");
    if (!(fit.tol > 0.0) || fit.max_iter < 1 || fit.ridge < 0.0) throw ConfigError("invalid fit options");
    try {
        sampling.validate();
        features.validate();
        score_scale.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    for (const auto& m : features.macros) {
        const bool listed = std::any_of(macro_series.begin(), macro_series.end(),
                                        [&](const MacroSource& s) { return s.name == m.series; });
        if (!listed) throw ConfigError("macro transform uses series " + m.series + " missing from macro_series");
    }
    if (std::none_of(macro_series.begin(), macro_series.end(),
                     [&](const MacroSource& s) { return s.name == features.market_rate_series; }))
        throw ConfigError("market rate series " + features.market_rate_series + " missing from macro_series");
}

Json PipelineConfig::to_json() const {
    Json macros = Json::array();
    for (const auto& m : macro_series)
        macros.push_back({{"name", m.name}, {"file", m.file}, {"frequency", std::string(to_string(m.frequency))}});
    Json j = {
        {"paths",
         {{"loans", loans.generic_string()},
          {"performance", performance.generic_string()},
          {"macro_dir", macro_dir.generic_string()},
          {"out_dir", out_dir.generic_string()}}},
        {"loan_columns",
         {{"delimiter", std::string(1, loan_columns.delimiter)},
          {"header", loan_columns.has_header},
          {"loan_id", loan_columns.loan_id},
          {"orig_month", loan_columns.orig_month},
          {"fico", loan_columns.fico},
          {"dti", loan_columns.dti},
          {"cltv", loan_columns.cltv},
          {"orig_upb", loan_columns.orig_upb},
          {"orig_int_rt", loan_columns.orig_int_rt}}},
        {"performance_columns",
         {{"delimiter", std::string(1, performance_columns.delimiter)},
          {"header", performance_columns.has_header},
          {"loan_id", performance_columns.loan_id},
          {"month", performance_columns.month},
          {"dlq_status", performance_columns.dlq_status}}},
        {"macro_series", macros},
        {"labeling",
         {{"horizon", labeling.horizon}, {"bad_threshold", labeling.bad_threshold}, {"clock_offset", labeling.clock_offset}}},
        {"book_age_offset", book_age_offset},
        {"train_fraction", train_fraction},
        {"seed", seed},
        {"threads", threads},
        {"sampling", hazscore::to_json(sampling)},
        {"features", hazscore::to_json(features)},
        {"fit", {{"tol", fit.tol}, {"max_iter", fit.max_iter}, {"ridge", fit.ridge}}},
        {"score", hazscore::to_json(score_scale)},
        {"cutoffs", cutoffs},
    };
    j["sampling"]["unit"] = sampling_unit == SamplingUnit::row ? "row" : "snapshot_panel";
    j["features"]["interaction"]["mode"] = interaction_mode == InteractionMode::fit ? "fit" : "fixed";
    j["features"]["interaction"]["n_fico_groups"] = n_fico_groups;
    j["features"]["interaction"]["n_upb_groups"] = n_upb_groups;
    j["features"]["bivariate_bins"] = bivariate_bins;
    j["score"]["band_width"] = band_width;
    j["score"]["bounds_from_train"] = score_bounds_from_train;
    if (synth) j["synth"] = hazscore::to_json(*synth);
    return j;
}

std::string PipelineConfig::hash() const {
    auto j = to_json();
    j.erase("threads");
    j["paths"].erase("out_dir");
    // input locations only matter through their contents
    j.erase("paths");
    return hex_digest(j.dump());
}

}  // namespace hazscore
