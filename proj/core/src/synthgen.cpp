#include "hazscore/synthgen.hpp"

#include <cmath>
#include <cstdio>
#include <span>
#include <numbers>
#include <stdexcept>

#include "hazscore/delimited.hpp"
#include "hazscore/hazard_model.hpp"
#include "hazscore/random.hpp"

namespace hazscore {

namespace {

constexpr std::uint64_t kAttributeStream = 0x41545452ULL;
constexpr std::uint64_t kDefaultStream = 0x44464c54ULL;
constexpr std::uint64_t kMacroStream = 0x4d41434fULL;
constexpr std::uint64_t kPilotStream = 0x50494c54ULL;

double standard_normal(std::mt19937_64& rng) {
    // Box-Muller on our own uniforms keeps draws identical across standard libraries.
    const double u1 = 1.0 - uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double round_to(double x, double step) { return step > 0.0 ? std::round(x / step) * step : x; }

std::string loan_id_for(std::int64_t index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "L%08lld", static_cast<long long>(index + 1));
    return buf;
}

}  // namespace

double TruncatedNormal::draw(std::mt19937_64& rng) const {
    for (int attempt = 0; attempt < 1000; ++attempt) {
        const double x = mean + sd * standard_normal(rng);
        if (x >= lo && x <= hi) return x;
    }
    return std::clamp(mean, lo, hi);
}

void TruncatedNormal::validate(std::string_view what) const {
    if (!(sd >= 0.0) || !(hi >= lo)) throw std::invalid_argument("invalid distribution for " + std::string(what));
}

GeneratorSpec GeneratorSpec::standard() {
    GeneratorSpec spec;
    spec.intercept = -1.0;
    spec.coefficients = {
        {"loan_age", 0.02},    {"snapshot_mob", 0.02}, {"fico", -0.011},
        {"dti", 0.03},         {"orig_int_rt", 0.05},  {"cltv", 0.006},
        {"cltv_pspline1", 0.02}, {"sato", 0.2},       {"UNRATENSA_lag_1month", 0.12},
        {"RCMFLBACTDPDPCT90P_q_to_q_pctchg", 0.8},  {"covid_index", -0.2},
        {"quarter1", -0.05},   {"quarter3", -0.15},
    };
    spec.macro_paths = {
        {"MORTGAGE30US", Frequency::monthly, 4.3, 0.0, 0.9, 40.0, 0.08},
        {"UNRATENSA", Frequency::monthly, 5.2, -0.01, 1.2, 55.0, 0.25},
        {"RCMFLBACTDPDPCT90P", Frequency::quarterly, 1.6, 0.0, 0.25, 36.0, 0.05},
    };
    return spec;
}

std::vector<double> GeneratorSpec::beta() const {
    const auto names = features.names();
    std::vector<double> b(names.size() + 1, 0.0);
    b[0] = intercept;
    for (const auto& [name, value] : coefficients) {
        const auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) throw std::invalid_argument("generator coefficient for unknown regressor '" + name + "'");
        b[static_cast<std::size_t>(it - names.begin()) + 1] = value;
    }
    return b;
}

MacroSet generate_macros(const GeneratorSpec& spec) {
    MacroSet set;
    const Month first = spec.orig_first - 24;
    const Month last = spec.data_end + 1;
    for (const auto& path : spec.macro_paths) {
        MacroSeries s;
        s.name = path.name;
        s.frequency = path.frequency;
        auto rng = substream(spec.seed, path.name, kMacroStream);
        const int step = path.frequency == Frequency::quarterly ? 3 : 1;
        const Month start = path.frequency == Frequency::quarterly ? first.quarter_start() : first;
        for (Month m = start; m <= last; m = m + step) {
            const double t = m - first;
            double v = path.level + path.trend * t +
                       path.amplitude * std::sin(2.0 * std::numbers::pi * t / path.period_months) +
                       path.noise_sd * standard_normal(rng);
            v = std::round(v * 1e4) / 1e4;
            s.observations.push_back({m, v});
        }
        validate_macro(s);
        set.emplace(path.name, std::move(s));
    }
    return set;
}

LoanOrigination generate_loan(const GeneratorSpec& spec, const MacroSet& macros, std::int64_t index) {
    LoanOrigination loan;
    loan.loan_id = loan_id_for(index);
    auto rng = substream(spec.seed, loan.loan_id, kAttributeStream);
    const int span = spec.orig_last - spec.orig_first;
    std::uniform_int_distribution<int> month_pick(0, span);
    loan.orig_month = spec.orig_first + month_pick(rng);
    loan.fico = static_cast<int>(std::lround(spec.fico.draw(rng)));
    loan.fico = std::clamp(loan.fico, 300, 850);
    loan.dti = std::round(spec.dti.draw(rng));
    loan.cltv = std::max(1.0, std::round(spec.cltv.draw(rng)));
    loan.orig_upb = std::max(spec.upb_rounding, round_to(spec.orig_upb.draw(rng), spec.upb_rounding));
    const auto market = macros.at(spec.features.market_rate_series).value_at(loan.orig_month);
    if (!market) throw std::invalid_argument("market rate path does not cover " + loan.orig_month.to_string());
    loan.orig_int_rt = round_to(*market + spec.rate_spread.draw(rng), spec.rate_rounding);
    if (loan.orig_int_rt <= 0.0) loan.orig_int_rt = spec.rate_rounding > 0.0 ? spec.rate_rounding : 0.125;
    return loan;
}

namespace {

double hazard_with(const GeneratorSpec& spec, const MacroSet& macros, std::span<const double> beta,
                   const LoanOrigination& loan, Month month) {
    const Month first = loan.orig_month + spec.performance_lag;
    PanelRow row;
    row.loan_id = loan.loan_id;
    row.snapshot_month = first;
    row.calendar_month = month;
    row.loan_age = month - first;
    row.snapshot_mob = spec.book_age_offset;
    const auto a = assemble(row, loan, macros, spec.features);
    if (!a.ok())
        throw std::invalid_argument("macro paths do not cover " + month.to_string() + " (" + a.flagged_series + ")");
    return predict_hazard(a.features.values, beta);
}

}  // namespace

double true_hazard(const GeneratorSpec& spec, const MacroSet& macros, const LoanOrigination& loan, Month month) {
    return hazard_with(spec, macros, spec.beta(), loan, month);
}

void GeneratorSpec::validate() const {
    if (n_loans < 1) throw std::invalid_argument("n_loans must be positive");
    if (orig_last < orig_first) throw std::invalid_argument("origination range is empty");
    if (data_end < orig_last + performance_lag) throw std::invalid_argument("data_end precedes the first performance month");
    if (horizon < 1 || bad_threshold < 1 || performance_lag < 0) throw std::invalid_argument("invalid horizon/threshold/lag");
    fico.validate("fico");
    dti.validate("dti");
    cltv.validate("cltv");
    orig_upb.validate("orig_upb");
    rate_spread.validate("rate_spread");
    features.validate();
    for (const auto& m : features.macros) {
        const bool present = std::any_of(macro_paths.begin(), macro_paths.end(),
                                         [&](const MacroPath& p) { return p.name == m.series; });
        if (!present) throw std::invalid_argument("no macro path for series " + m.series);
    }
    if (std::none_of(macro_paths.begin(), macro_paths.end(),
                     [&](const MacroPath& p) { return p.name == features.market_rate_series; }))
        throw std::invalid_argument("no macro path for market rate series " + features.market_rate_series);
    const auto b = beta();

    const auto macros = generate_macros(*this);
    auto rng = substream(seed, "pilot", kPilotStream);
    const std::int64_t pilot = std::min<std::int64_t>(n_loans, 500);
    std::int64_t draws = 0, outside = 0;
    for (std::int64_t k = 0; k < pilot; ++k) {
        std::uniform_int_distribution<std::int64_t> pick(0, n_loans - 1);
        const auto loan = generate_loan(*this, macros, pick(rng));
        const Month first = loan.orig_month + performance_lag;
        for (int j = 0; j < horizon && first + j <= data_end; ++j) {
            const double h = hazard_with(*this, macros, b, loan, first + j);
            ++draws;
            if (!(h > 0.0 && h < 0.5)) ++outside;
        }
    }
    if (draws > 0 && static_cast<double>(outside) > 0.01 * static_cast<double>(draws))
        throw std::invalid_argument("generator coefficients put more than 1% of monthly hazards outside (0, 0.5)");
}

Portfolio generate(const GeneratorSpec& spec) {
    spec.validate();
    Portfolio out;
    out.macros = generate_macros(spec);
    const auto beta = spec.beta();
    out.loans.reserve(static_cast<std::size_t>(spec.n_loans));
    for (std::int64_t i = 0; i < spec.n_loans; ++i) {
        auto loan = generate_loan(spec, out.macros, i);
        auto rng = substream(spec.seed, loan.loan_id, kDefaultStream);
        const Month first = loan.orig_month + spec.performance_lag;
        const std::size_t start = out.performance.size();
        bool defaulted = false;
        for (int j = 0; first + j <= spec.data_end && j < spec.horizon + 4; ++j) {
            const Month m = first + j;
            if (defaulted) {
                // a few more delinquent months after the event
                out.performance.push_back({loan.loan_id, m, spec.bad_threshold + (m - first) % 3 + 1});
                if (uniform01(rng) < 0.5) break;
                continue;
            }
            if (j < spec.horizon) {
                const double h = hazard_with(spec, out.macros, beta, loan, m);
                if (uniform01(rng) < h) {
                    defaulted = true;
                    if (out.performance.size() > start && uniform01(rng) < 0.5) out.performance.back().dlq_status = 1;
                    out.performance.push_back({loan.loan_id, m, spec.bad_threshold});
                    continue;
                }
            }
            out.performance.push_back({loan.loan_id, m, 0});
        }
        out.loans.push_back(std::move(loan));
    }
    return out;
}

void write_portfolio(const Portfolio& portfolio, const PortfolioFiles& files) {
    {
        DelimitedWriter w(files.loans, '|');
        for (const auto& l : portfolio.loans) {
            w.field(l.loan_id).field(l.orig_month.to_string()).field(l.fico).field(l.dti).field(l.cltv);
            w.field(l.orig_upb).field(l.orig_int_rt);
            w.end_row();
        }
        w.close();
    }
    {
        DelimitedWriter w(files.performance, '|');
        for (const auto& r : portfolio.performance) {
            w.field(r.loan_id).field(r.month.to_string()).field(r.dlq_status);
            w.end_row();
        }
        w.close();
    }
    for (const auto& [name, series] : portfolio.macros) {
        DelimitedWriter w(files.macro_dir / (name + ".csv"));
        w.header({"month", "value"});
        for (const auto& o : series.observations) {
            w.field(o.month.to_string()).field(o.value);
            w.end_row();
        }
        w.close();
    }
}

}  // namespace hazscore
