#include "hazscore/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace hazscore {

void SplineSpec::validate() const {
    for (std::size_t i = 1; i < knots.size(); ++i)
        if (!(knots[i] > knots[i - 1]))
            throw std::invalid_argument("knots for " + variable + " must be strictly increasing");
    for (double k : knots)
        if (!std::isfinite(k)) throw std::invalid_argument("knots for " + variable + " must be finite");
}

double sato(double orig_int_rt, double market_rate, SatoSign sign) {
    return sign == SatoSign::above_market ? orig_int_rt - market_rate : market_rate - orig_int_rt;
}

MacroTransform parse_macro_transform(std::string_view s) {
    if (s == "yoy_diff") return MacroTransform::yoy_diff;
    if (s == "qoq_diff") return MacroTransform::qoq_diff;
    if (s == "yoy_pctchg") return MacroTransform::yoy_pctchg;
    if (s == "qoq_pctchg") return MacroTransform::qoq_pctchg;
    if (s == "lag") return MacroTransform::lag;
    throw std::invalid_argument("unknown macro transform '" + std::string(s) + "'");
}

std::string_view to_string(MacroTransform t) {
    switch (t) {
        case MacroTransform::yoy_diff: return "yoy_diff";
        case MacroTransform::qoq_diff: return "qoq_diff";
        case MacroTransform::yoy_pctchg: return "yoy_pctchg";
        case MacroTransform::qoq_pctchg: return "qoq_pctchg";
        case MacroTransform::lag: return "lag";
    }
    return "?";
}

std::string MacroTransformSpec::regressor_name() const {
    switch (transform) {
        case MacroTransform::yoy_diff: return series + "_y_to_y_diff";
        case MacroTransform::qoq_diff: return series + "_q_to_q_diff";
        case MacroTransform::yoy_pctchg: return series + "_y_to_y_pctchg";
        case MacroTransform::qoq_pctchg: return series + "_q_to_q_pctchg";
        case MacroTransform::lag: return series + "_lag_" + std::to_string(lag_months) + "month";
    }
    return series;
}

std::string_view to_string(MacroFlag f) {
    switch (f) {
        case MacroFlag::ok: return "ok";
        case MacroFlag::missing_value: return "missing macro value";
        case MacroFlag::missing_base: return "missing macro base value";
        case MacroFlag::zero_base: return "zero macro base value";
    }
    return "?";
}

MacroValue macro_transform(const MacroSeries& series, const MacroTransformSpec& spec, Month month) {
    if (spec.transform == MacroTransform::lag) {
        if (spec.lag_months < 0) throw std::invalid_argument("lag_months must be non-negative");
        const auto v = series.value_at(month - spec.lag_months);
        return v ? MacroValue{*v, MacroFlag::ok} : MacroValue{0.0, MacroFlag::missing_value};
    }
    const auto current = series.value_at(month);
    if (!current) return {0.0, MacroFlag::missing_value};
    const bool yoy = spec.transform == MacroTransform::yoy_diff || spec.transform == MacroTransform::yoy_pctchg;
    const auto base = series.value_at(month - (yoy ? 12 : 3));
    if (!base) return {0.0, MacroFlag::missing_base};
    const double diff = *current - *base;
    if (spec.transform == MacroTransform::yoy_diff || spec.transform == MacroTransform::qoq_diff) return {diff, MacroFlag::ok};
    if (*base == 0.0) return {0.0, MacroFlag::zero_base};
    return {diff / *base, MacroFlag::ok};
}

Indicators indicators(Month calendar_month) {
    Indicators ind;
    ind.covid_index = (calendar_month >= Month(2020, 4) && calendar_month <= Month(2020, 9)) ? 1 : 0;
    ind.quarter1 = calendar_month.quarter() == 1 ? 1 : 0;
    ind.quarter3 = calendar_month.quarter() == 3 ? 1 : 0;
    return ind;
}

InteractionSpec InteractionSpec::default_bands() {
    InteractionSpec spec;
    spec.upb_band_edges = {160000, 238000, 350000};
    spec.band_multipliers = {1.011120904, 1.062573458, 0.98437428, 0.948754518};
    spec.slopes = {0.000650895, 0.000619377, 0.00066858, 0.000693681};
    spec.average_slope = 0.000658133;
    return spec;
}

InteractionSpec InteractionSpec::identity(std::vector<double> edges) {
    InteractionSpec spec;
    spec.band_multipliers.assign(edges.size() + 1, 1.0);
    spec.upb_band_edges = std::move(edges);
    return spec;
}

std::size_t InteractionSpec::band_of(double orig_upb) const {
    return static_cast<std::size_t>(std::upper_bound(upb_band_edges.begin(), upb_band_edges.end(), orig_upb) -
                                    upb_band_edges.begin());
}

void InteractionSpec::validate() const {
    if (band_multipliers.size() != upb_band_edges.size() + 1)
        throw std::invalid_argument("interaction needs one multiplier per band (edges + 1)");
    for (std::size_t i = 1; i < upb_band_edges.size(); ++i)
        if (!(upb_band_edges[i] > upb_band_edges[i - 1]))
            throw std::invalid_argument("interaction band edges must be strictly increasing");
    for (double m : band_multipliers)
        if (!(m > 0.0) || !std::isfinite(m)) throw std::invalid_argument("interaction multipliers must be positive");
}

double apply_interaction(double fico, double orig_upb, const InteractionSpec& spec) {
    return fico * spec.band_multipliers[spec.band_of(orig_upb)];
}

InteractionSpec interaction_from_bad_rates(const std::vector<std::vector<double>>& bad_rates,
                                           std::vector<double> upb_band_edges) {
    if (bad_rates.empty()) throw InteractionError("empty bad-rate table");
    const std::size_t n_fico = bad_rates.front().size();
    if (n_fico < 2) throw InteractionError("need at least two fico groups");
    if (upb_band_edges.size() + 1 != bad_rates.size())
        throw InteractionError("bad-rate table rows must match the number of upb bands");

    InteractionSpec spec;
    spec.upb_band_edges = std::move(upb_band_edges);
    for (std::size_t g = 0; g < bad_rates.size(); ++g) {
        if (bad_rates[g].size() != n_fico) throw InteractionError("ragged bad-rate table");
        const double slope = (bad_rates[g].front() - bad_rates[g].back()) / static_cast<double>(n_fico - 1);
        if (!(slope > 0.0))
            throw InteractionError("upb group " + std::to_string(g + 1) +
                                   ": bad rate does not decrease from the lowest to the highest fico group");
        spec.slopes.push_back(slope);
    }
    spec.average_slope = std::accumulate(spec.slopes.begin(), spec.slopes.end(), 0.0) /
                         static_cast<double>(spec.slopes.size());
    for (double s : spec.slopes) spec.band_multipliers.push_back(spec.average_slope / s);
    return spec;
}

std::vector<double> quantile_edges(std::span<const double> values, std::span<const double> weights, int groups) {
    if (groups < 1) throw std::invalid_argument("groups must be positive");
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);

    std::vector<double> edges;
    double below = 0.0;
    std::size_t i = 0;
    for (int k = 1; k < groups; ++k) {
        const double target = total * k / groups - 1e-12 * total;
        double edge = std::numeric_limits<double>::infinity();
        while (i < order.size()) {
            const double v = values[order[i]];
            if (below >= target && (edges.empty() || v > edges.back())) {
                edge = v;
                break;
            }
            while (i < order.size() && values[order[i]] == v) below += weights[order[i++]];
        }
        edges.push_back(edge);
    }
    return edges;
}

InteractionFit fit_interaction(std::span<const InteractionObservation> rows, int n_fico_groups, int n_upb_groups) {
    if (n_fico_groups < 2 || n_upb_groups < 1) throw std::invalid_argument("invalid interaction group counts");
    std::vector<double> fico(rows.size()), upb(rows.size()), w(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        fico[i] = rows[i].fico;
        upb[i] = rows[i].orig_upb;
        w[i] = rows[i].weight;
    }
    InteractionFit fit;
    fit.fico_edges = quantile_edges(fico, w, n_fico_groups);
    auto upb_edges = quantile_edges(upb, w, n_upb_groups);

    const auto group_of = [](const std::vector<double>& edges, double x) {
        return static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), x) - edges.begin());
    };
    std::vector<std::vector<double>> bad(static_cast<std::size_t>(n_upb_groups),
                                         std::vector<double>(static_cast<std::size_t>(n_fico_groups), 0.0));
    auto tot = bad;
    for (const auto& r : rows) {
        const auto g = group_of(upb_edges, r.orig_upb);
        const auto f = group_of(fit.fico_edges, r.fico);
        tot[g][f] += r.weight;
        if (r.status == 1) bad[g][f] += r.weight;
    }
    fit.bad_rates = bad;
    for (std::size_t g = 0; g < bad.size(); ++g) {
        for (std::size_t f = 0; f < bad[g].size(); ++f) {
            if (!(tot[g][f] > 0.0))
                throw InteractionError("empty interaction cell (upb group " + std::to_string(g + 1) + ", fico group " +
                                       std::to_string(f + 1) + ")");
            fit.bad_rates[g][f] = bad[g][f] / tot[g][f];
        }
    }
    for (double e : upb_edges)
        if (!std::isfinite(e)) throw InteractionError("orig_upb values too tied to form equal-frequency groups");
    fit.spec = interaction_from_bad_rates(fit.bad_rates, std::move(upb_edges));
    return fit;
}

std::vector<std::string> FeatureSpec::names() const {
    std::vector<std::string> out;
    const auto spline = [&](const SplineSpec& s) {
        out.push_back(s.variable);
        for (std::size_t k = 0; k < s.knots.size(); ++k) out.push_back(s.variable + "_pspline" + std::to_string(k + 1));
    };
    spline(loan_age);
    spline(snapshot_mob);
    out.insert(out.end(), {"fico", "dti", "orig_int_rt"});
    spline(cltv);
    out.insert(out.end(), {"sato", "fico_orig_upb"});
    for (const auto& m : macros) out.push_back(m.regressor_name());
    out.insert(out.end(), {"covid_index", "quarter1", "quarter3"});
    return out;
}

void FeatureSpec::validate() const {
    loan_age.validate();
    snapshot_mob.validate();
    cltv.validate();
    interaction.validate();
    for (const auto& m : macros) {
        if (m.series.empty()) throw std::invalid_argument("macro transform without a series name");
        if (m.lag_months < 0) throw std::invalid_argument("macro lag must be non-negative");
    }
}

AssembleResult assemble(const PanelRow& row, const LoanOrigination& loan, const MacroSet& macros,
                        const FeatureSpec& spec) {
    AssembleResult result;
    auto& v = result.features.values;
    v.reserve(24);
    const auto spline = [&](const SplineSpec& s, double x) {
        v.push_back(x);
        for (double k : s.knots) v.push_back(pspline(x, k));
    };
    spline(spec.loan_age, row.loan_age);
    spline(spec.snapshot_mob, row.snapshot_mob);
    v.push_back(loan.fico);
    v.push_back(loan.dti);
    v.push_back(loan.orig_int_rt);
    spline(spec.cltv, loan.cltv);

    const auto market = macros.find(spec.market_rate_series);
    if (market == macros.end()) throw DataError("market rate series " + spec.market_rate_series + " not loaded");
    const auto rate = market->second.value_at(loan.orig_month);
    if (!rate)
        throw DataError("no " + spec.market_rate_series + " value for origination month " +
                        loan.orig_month.to_string() + " (loan " + loan.loan_id + ")");
    v.push_back(sato(loan.orig_int_rt, *rate, spec.sato_sign));
    v.push_back(apply_interaction(loan.fico, loan.orig_upb, spec.interaction));

    for (const auto& m : spec.macros) {
        const auto it = macros.find(m.series);
        if (it == macros.end()) throw DataError("macro series " + m.series + " not loaded");
        const auto mv = macro_transform(it->second, m, row.calendar_month);
        if (!mv.ok() && result.ok()) {
            result.flag = mv.flag;
            result.flagged_series = m.series;
        }
        v.push_back(mv.value);
    }
    const auto ind = indicators(row.calendar_month);
    v.push_back(ind.covid_index);
    v.push_back(ind.quarter1);
    v.push_back(ind.quarter3);
    return result;
}

std::vector<BivariateBin> bivariate_logodds_table(std::span<const BivariateObservation> rows, int n_bins) {
    if (n_bins < 2) throw std::invalid_argument("bivariate table needs at least 2 bins");
    std::vector<double> x(rows.size()), w(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        x[i] = rows[i].value;
        w[i] = rows[i].weight;
    }
    const auto edges = quantile_edges(x, w, n_bins);
    std::vector<BivariateBin> bins(static_cast<std::size_t>(n_bins));
    std::vector<double> bad(bins.size(), 0.0);
    for (auto& b : bins) {
        b.lo = std::numeric_limits<double>::infinity();
        b.hi = -std::numeric_limits<double>::infinity();
    }
    for (const auto& r : rows) {
        const auto k = static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), r.value) - edges.begin());
        auto& b = bins[k];
        b.lo = std::min(b.lo, r.value);
        b.hi = std::max(b.hi, r.value);
        ++b.rows;
        b.weight += r.weight;
        if (r.status == 1) bad[k] += r.weight;
    }
    std::vector<BivariateBin> out;
    for (std::size_t k = 0; k < bins.size(); ++k) {
        auto b = bins[k];
        if (b.rows == 0) continue;
        b.bad_rate = bad[k] / b.weight;
        b.defined = b.bad_rate > 0.0 && b.bad_rate < 1.0;
        b.log_odds = b.defined ? std::log(b.bad_rate / (1.0 - b.bad_rate)) : 0.0;
        out.push_back(b);
    }
    return out;
}

}  // namespace hazscore
