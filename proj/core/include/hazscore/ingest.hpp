#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hazscore/month.hpp"

namespace hazscore {

/// Fatal input problem (duplicate macro months, unreadable layout, ...).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LoanOrigination {
    std::string loan_id;
    Month orig_month;
    int fico = 0;
    double dti = 0.0;
    double cltv = 0.0;
    double orig_upb = 0.0;
    double orig_int_rt = 0.0;

    bool operator==(const LoanOrigination&) const = default;
};

struct PerformanceRow {
    std::string loan_id;
    Month month;
    int dlq_status = 0;
};

/// Zero-based column positions within a delimited record.
struct LoanColumnMap {
    char delimiter = '|';
    bool has_header = false;
    int loan_id = 0;
    int orig_month = 1;
    int fico = 2;
    int dti = 3;
    int cltv = 4;
    int orig_upb = 5;
    int orig_int_rt = 6;
};

struct PerformanceColumnMap {
    char delimiter = '|';
    bool has_header = false;
    int loan_id = 0;
    int month = 1;
    int dlq_status = 2;
};

struct RowRejection {
    std::size_t line = 0;
    std::string reason;
};

template <class Row>
struct ParseResult {
    std::vector<Row> rows;
    std::vector<RowRejection> rejections;
    std::size_t lines_read = 0;
};

/// Parses a loan origination file. Bad rows become rejections; an unreadable
/// file throws IoError.
ParseResult<LoanOrigination> parse_loans(const std::filesystem::path& path, const LoanColumnMap& map = {});
ParseResult<PerformanceRow> parse_performance(const std::filesystem::path& path, const PerformanceColumnMap& map = {});

/// Single-record parsers used by the file readers. Return an empty string on
/// success, otherwise the rejection reason.
std::string parse_loan_record(std::string_view line, const LoanColumnMap& map, LoanOrigination& out);
std::string parse_performance_record(std::string_view line, const PerformanceColumnMap& map, PerformanceRow& out);

enum class Terminal : std::uint8_t { good = 0, bad = 1 };

/// A labeled, censored loan: consecutive months from `first_month`, status 0
/// everywhere except possibly a final 1.
struct LoanHistory {
    LoanOrigination origination;
    Month first_month;
    std::vector<std::uint8_t> status;

    std::size_t size() const { return status.size(); }
    Month month_at(std::size_t i) const { return first_month + static_cast<int>(i); }
    Terminal terminal() const { return (!status.empty() && status.back() == 1) ? Terminal::bad : Terminal::good; }
    bool terminal_bad() const { return terminal() == Terminal::bad; }

    bool operator==(const LoanHistory&) const = default;
};

struct LabelOptions {
    int horizon = 36;
    int bad_threshold = 2;
    /// Months already on the censoring clock at the first performance month.
    int clock_offset = 0;
};

struct Exclusion {
    std::string loan_id;
    std::string reason;
};

struct LabelResult {
    std::vector<LoanHistory> histories;  // sorted by loan_id
    std::vector<Exclusion> exclusions;   // sorted by loan_id
};

/// Groups performance rows per loan, drops loans with gaps or unmatched
/// origination, labels the first month at or above the bad threshold and
/// truncates there or at the horizon.
LabelResult validate_and_label(std::span<const LoanOrigination> loans, std::span<const PerformanceRow> perf,
                               const LabelOptions& options = {});

/// Inverse view of a labeled history as performance rows (bad month coded at
/// `bad_threshold`), used to re-run labeling.
std::vector<PerformanceRow> to_performance_rows(std::span<const LoanHistory> histories, int bad_threshold = 2);

/// Throws DataError if a history breaks its type invariants.
void check_history(const LoanHistory& h, const LabelOptions& options = {});

struct MonthCount {
    std::int64_t n_bads = 0;
    std::int64_t n_goods = 0;

    std::int64_t of(int status) const { return status == 1 ? n_bads : n_goods; }
    bool operator==(const MonthCount&) const = default;
};

/// Bads and goods observed per calendar month.
using MonthlyCounts = std::map<Month, MonthCount>;

MonthlyCounts monthly_counts(std::span<const LoanHistory> histories);

enum class Frequency { monthly, quarterly };

Frequency parse_frequency(std::string_view s);
std::string_view to_string(Frequency f);

struct MacroObservation {
    Month month;
    double value = 0.0;
};

struct MacroSeries {
    std::string name;
    Frequency frequency = Frequency::monthly;
    std::vector<MacroObservation> observations;  // strictly increasing, no gaps

    /// Value in effect at `month`; quarterly series are held within their
    /// quarter. Empty if not covered.
    std::optional<double> value_at(Month month) const;
    Month first() const { return observations.front().month; }
    Month last() const { return observations.back().month; }
};

/// Reads a two-column `month,value` CSV (optional header). Out-of-order,
/// duplicate or gapped months throw DataError.
MacroSeries load_macro(const std::filesystem::path& path, std::string name, Frequency frequency);

/// Validates and sorts-checks an in-memory series the same way load_macro does.
void validate_macro(const MacroSeries& series);

}  // namespace hazscore
