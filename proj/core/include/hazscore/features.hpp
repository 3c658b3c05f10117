#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "hazscore/ingest.hpp"
#include "hazscore/panel.hpp"

namespace hazscore {

/// Degree-1 truncated power basis term: max(x - knot, 0).
constexpr double pspline(double x, double knot) { return x > knot ? x - knot : 0.0; }

struct SplineSpec {
    std::string variable;
    std::vector<double> knots;  // strictly increasing

    void validate() const;
};

enum class SatoSign {
    above_market,  // orig_int_rt - market rate
    below_market,  // market rate - orig_int_rt
};

double sato(double orig_int_rt, double market_rate, SatoSign sign = SatoSign::above_market);

enum class MacroTransform { yoy_diff, qoq_diff, yoy_pctchg, qoq_pctchg, lag };

MacroTransform parse_macro_transform(std::string_view s);
std::string_view to_string(MacroTransform t);

struct MacroTransformSpec {
    std::string series;
    MacroTransform transform = MacroTransform::lag;
    int lag_months = 0;

    /// Regressor name, e.g. UNRATENSA_lag_1month or X_q_to_q_pctchg.
    std::string regressor_name() const;
};

enum class MacroFlag { ok, missing_value, missing_base, zero_base };

std::string_view to_string(MacroFlag f);

struct MacroValue {
    double value = 0.0;
    MacroFlag flag = MacroFlag::ok;

    bool ok() const { return flag == MacroFlag::ok; }
};

/// diff = x_t - x_base, pctchg = (x_t - x_base) / x_base, lag = x_{t-lag}.
/// The yoy base is 12 months back, qoq 3 months (one observation on a
/// quarterly series, which is held constant within its quarter).
MacroValue macro_transform(const MacroSeries& series, const MacroTransformSpec& spec, Month month);

struct Indicators {
    int covid_index = 0;
    int quarter1 = 0;
    int quarter3 = 0;

    bool operator==(const Indicators&) const = default;
};

/// covid_index for 2020-04..2020-09; Q1 and Q3 flags with Q4 (and Q2) as reference.
Indicators indicators(Month calendar_month);

/// FICO multipliers by orig_upb band: [0, e1), [e1, e2), ..., [e_last, inf).
struct InteractionSpec {
    std::vector<double> upb_band_edges;
    std::vector<double> band_multipliers;
    std::vector<double> slopes;  // per band, informational
    double average_slope = 0.0;

    /// Band edges 160000/238000/350000 with their published multipliers.
    static InteractionSpec default_bands();
    static InteractionSpec identity(std::vector<double> edges);

    std::size_t band_of(double orig_upb) const;
    void validate() const;
};

double apply_interaction(double fico, double orig_upb, const InteractionSpec& spec);

/// Thrown when an interaction cannot be identified from the data.
class InteractionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Multipliers from a bad-rate table indexed [upb group][fico group], fico
/// groups ordered from lowest to highest score. slope_g is the drop in bad
/// rate from the first to the last fico group per unit group step.
InteractionSpec interaction_from_bad_rates(const std::vector<std::vector<double>>& bad_rates,
                                           std::vector<double> upb_band_edges);

struct InteractionObservation {
    double fico = 0.0;
    double orig_upb = 0.0;
    int status = 0;
    double weight = 1.0;
};

struct InteractionFit {
    InteractionSpec spec;
    std::vector<double> fico_edges;
    std::vector<std::vector<double>> bad_rates;  // [upb group][fico group]
};

/// Equal-frequency (weighted quantile) groups on fico and orig_upb, weighted
/// bad rate per cell, then interaction_from_bad_rates.
InteractionFit fit_interaction(std::span<const InteractionObservation> rows, int n_fico_groups = 5,
                               int n_upb_groups = 4);

/// Cut points x < edge[k] splitting weighted values into `groups`
/// equal-frequency groups. Each lower group holds at least its share of
/// weight; heavily tied data can leave later groups empty.
std::vector<double> quantile_edges(std::span<const double> values, std::span<const double> weights, int groups);

using MacroSet = std::map<std::string, MacroSeries, std::less<>>;

struct FeatureSpec {
    SplineSpec loan_age{"loan_age", {8, 20}};
    SplineSpec snapshot_mob{"snapshot_mob", {9, 21}};
    SplineSpec cltv{"cltv", {80}};
    InteractionSpec interaction = InteractionSpec::default_bands();
    std::vector<MacroTransformSpec> macros{
        {"RCMFLBACTDPDPCT90P", MacroTransform::qoq_pctchg, 0},
        {"UNRATENSA", MacroTransform::lag, 1},
    };
    std::string market_rate_series = "MORTGAGE30US";
    SatoSign sato_sign = SatoSign::above_market;

    /// Regressor names in FeatureVector order (intercept excluded).
    std::vector<std::string> names() const;
    void validate() const;
};

struct FeatureVector {
    std::vector<double> values;

    bool operator==(const FeatureVector&) const = default;
};

struct AssembleResult {
    FeatureVector features;
    MacroFlag flag = MacroFlag::ok;
    std::string flagged_series;

    bool ok() const { return flag == MacroFlag::ok; }
};

/// Builds the regressors for one panel row. A missing market rate at
/// origination throws DataError; macro gaps flag the row instead.
AssembleResult assemble(const PanelRow& row, const LoanOrigination& loan, const MacroSet& macros,
                        const FeatureSpec& spec);

struct BivariateObservation {
    double value = 0.0;
    int status = 0;
    double weight = 1.0;
};

struct BivariateBin {
    double lo = 0.0;  // smallest value in the bin
    double hi = 0.0;  // largest value in the bin
    std::int64_t rows = 0;
    double weight = 0.0;
    double bad_rate = 0.0;
    double log_odds = 0.0;
    bool defined = true;  // false when bad_rate is 0 or 1
};

/// Weighted bad rate and log-odds over equal-frequency bins of `value`.
/// Bins left empty by ties are dropped. Throws std::invalid_argument for n_bins < 2.
std::vector<BivariateBin> bivariate_logodds_table(std::span<const BivariateObservation> rows, int n_bins);

}  // namespace hazscore
