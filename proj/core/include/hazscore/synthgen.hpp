#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "hazscore/features.hpp"
#include "hazscore/ingest.hpp"

namespace hazscore {

struct TruncatedNormal {
    double mean = 0.0;
    double sd = 1.0;
    double lo = -1e300;
    double hi = 1e300;

    double draw(std::mt19937_64& rng) const;
    void validate(std::string_view what) const;
};

/// level + trend * t + amplitude * sin(2 pi t / period) + N(0, noise_sd), t in months.
struct MacroPath {
    std::string name;
    Frequency frequency = Frequency::monthly;
    double level = 0.0;
    double trend = 0.0;
    double amplitude = 0.0;
    double period_months = 48.0;
    double noise_sd = 0.0;
};

struct GeneratorSpec {
    std::int64_t n_loans = 10000;
    Month orig_first{2018, 2};
    Month orig_last{2021, 6};
    Month data_end{2024, 9};
    int performance_lag = 1;  // first performance month = origination + lag

    TruncatedNormal fico{745, 45, 620, 830};
    TruncatedNormal dti{34, 9, 5, 50};
    TruncatedNormal cltv{76, 15, 20, 105};
    TruncatedNormal orig_upb{270000, 110000, 50000, 800000};
    TruncatedNormal rate_spread{0.25, 0.35, -1.0, 1.5};  // note rate minus market rate
    double upb_rounding = 1000.0;
    double rate_rounding = 0.125;

    FeatureSpec features;
    double intercept = -3.0;
    std::map<std::string, double> coefficients;  // by regressor name; missing names are 0
    std::vector<MacroPath> macro_paths;

    int horizon = 36;
    int bad_threshold = 2;
    int book_age_offset = 0;
    std::uint64_t seed = 1;

    /// A realistic portfolio: fico/dti/cltv/loan-age/macro effects, hazards near 0.1-1% a month.
    static GeneratorSpec standard();

    /// True coefficient vector aligned with features.names(), intercept first.
    std::vector<double> beta() const;
    /// Throws std::invalid_argument for a malformed spec or one whose hazards
    /// fall outside (0, 0.5) for more than 1% of pilot draws.
    void validate() const;
};

struct Portfolio {
    std::vector<LoanOrigination> loans;
    std::vector<PerformanceRow> performance;
    MacroSet macros;
};

MacroSet generate_macros(const GeneratorSpec& spec);

/// Attributes of loan `index` (0-based); depends only on (seed, index).
LoanOrigination generate_loan(const GeneratorSpec& spec, const MacroSet& macros, std::int64_t index);

/// Hazard for `loan` in calendar `month` under the generating coefficients,
/// with the snapshot at the first performance month.
double true_hazard(const GeneratorSpec& spec, const MacroSet& macros, const LoanOrigination& loan, Month month);

/// Simulates every loan month by month until default, the data end, or a few
/// months past the horizon.
Portfolio generate(const GeneratorSpec& spec);

struct PortfolioFiles {
    std::filesystem::path loans;
    std::filesystem::path performance;
    std::filesystem::path macro_dir;
};

/// Writes the loan file and performance file in the default `|` layouts and
/// one `month,value` CSV per macro series (named <series>.csv).
void write_portfolio(const Portfolio& portfolio, const PortfolioFiles& files);

}  // namespace hazscore
