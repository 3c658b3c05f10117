#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hazscore/ingest.hpp"
#include "hazscore/month.hpp"

namespace hazscore {

/// One observation of the exploded panel. `loan_id` views the owning
/// LoanHistory and is valid only while that history is alive.
struct PanelRow {
    std::string_view loan_id;
    Month snapshot_month;
    Month calendar_month;
    int loan_age = 0;
    int snapshot_mob = 0;
    std::uint8_t status = 0;
    double weight = 1.0;

    bool operator==(const PanelRow&) const = default;
};

using PanelSink = std::function<void(const PanelRow&)>;

/// Rows in the fully exploded panel of a loan with n observations: n(n+1)/2.
constexpr std::int64_t exploded_size(std::int64_t n) { return n <= 0 ? 0 : n * (n + 1) / 2; }

/// Emits every snapshot sub-panel of `history`, ordered by snapshot then
/// loan age, all with weight 1. `book_age_offset` is the months on book at
/// the first performance month.
void explode_full(const LoanHistory& history, const PanelSink& sink, int book_age_offset = 0);
std::vector<PanelRow> explode_full(const LoanHistory& history, int book_age_offset = 0);

struct SamplingTier {
    std::int64_t lo = 1;
    std::int64_t hi = 0;  // inclusive; <= 0 means unbounded
    double probability = 1.0;

    bool contains(std::int64_t count) const { return count >= lo && (hi <= 0 || count <= hi); }
};

/// Keep-probabilities by monthly count, separately for bad and good rows.
struct SamplingRateTable {
    std::vector<SamplingTier> bad_tiers;
    std::vector<SamplingTier> good_tiers;

    /// The progressive weighting tiers for bads (1..0.65) and goods (0.1..0.011111111).
    static SamplingRateTable defaults();
    /// Every row kept with probability 1.
    static SamplingRateTable keep_all();

    /// Throws std::invalid_argument unless each tier list partitions [1, inf)
    /// in order with probabilities in (0, 1].
    void validate() const;
};

/// Keep-probability for a row of `status` in a month with `monthly_count`
/// rows of that status. Throws DataError when the count is below 1.
double rate_for(int status, std::int64_t monthly_count, const SamplingRateTable& table);

enum class SamplingUnit { row, snapshot_panel };

struct SamplingOptions {
    SamplingUnit unit = SamplingUnit::row;
    int book_age_offset = 0;
    unsigned threads = 0;
    std::size_t block_size = 2048;  // loans per parallel block
};

struct SampleSummary {
    std::int64_t loans = 0;
    std::int64_t original_rows = 0;
    std::int64_t full_panel_rows = 0;
    std::int64_t sampled_rows = 0;
    double total_weight = 0.0;
};

/// Draws the backward weighted sample without materializing the exploded
/// panel. In row mode each exploded row is kept independently with
/// probability rate_for(row.status, counts[row.calendar_month]) and given
/// weight 1/p: an observation at within-loan index m (1-based) has m replicas,
/// so K ~ Binomial(m, p) distinct loan ages are drawn from {0..m-1}.
/// In snapshot_panel mode whole sub-panels are kept, keyed by the status of the
/// panel's final row and the count at the snapshot month.
/// Rows of one loan are emitted contiguously, ordered by snapshot then loan
/// age, and loans in input order; output is fixed by (seed, loan ids)
/// regardless of thread count.
SampleSummary backward_weighted_sample(std::span<const LoanHistory> histories, const MonthlyCounts& counts,
                                       const SamplingRateTable& table, std::uint64_t seed, const PanelSink& sink,
                                       const SamplingOptions& options = {});

/// Sample for one loan; the building block of backward_weighted_sample.
void sample_loan(const LoanHistory& history, const MonthlyCounts& counts, const SamplingRateTable& table,
                 std::uint64_t seed, const SamplingOptions& options, std::vector<PanelRow>& out);

/// Original (unexploded) observations: snapshot at the first month, weight 1.
void original_rows(const LoanHistory& history, const PanelSink& sink, int book_age_offset = 0);

enum class SplitSet : std::uint8_t { train, test };

std::string_view to_string(SplitSet s);

struct SplitAssignment {
    std::unordered_map<std::string, SplitSet> assignment;
    double train_fraction = 0.7;

    SplitSet at(const std::string& loan_id) const { return assignment.at(loan_id); }
};

/// Assigns loans to train/test within the bad and good terminal strata,
/// round(fraction * stratum size) to train. Independent of input order.
SplitAssignment stratified_split(std::span<const LoanHistory> histories, double train_fraction, std::uint64_t seed);

}  // namespace hazscore
