#include "hazscore/panel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "hazscore/parallel.hpp"
#include "hazscore/random.hpp"

namespace hazscore {

namespace {

constexpr std::uint64_t kSampleStream = 0x5a4d504cULL;
constexpr std::uint64_t kSplitStream = 0x53504c54ULL;

void validate_tiers(const std::vector<SamplingTier>& tiers, std::string_view which) {
    if (tiers.empty()) throw std::invalid_argument(std::string(which) + " tiers are empty");
    std::int64_t expected_lo = 1;
    for (std::size_t i = 0; i < tiers.size(); ++i) {
        const auto& t = tiers[i];
        if (t.lo != expected_lo)
            throw std::invalid_argument(std::string(which) + " tier " + std::to_string(i) + " starts at " +
                                        std::to_string(t.lo) + ", expected " + std::to_string(expected_lo));
        if (!(t.probability > 0.0 && t.probability <= 1.0))
            throw std::invalid_argument(std::string(which) + " tier " + std::to_string(i) +
                                        " probability outside (0, 1]");
        const bool last = i + 1 == tiers.size();
        if (last) {
            if (t.hi > 0) throw std::invalid_argument(std::string(which) + " tiers do not extend to infinity");
        } else {
            if (t.hi < t.lo) throw std::invalid_argument(std::string(which) + " tier " + std::to_string(i) + " is empty");
            expected_lo = t.hi + 1;
        }
    }
}

MonthCount count_at(const MonthlyCounts& counts, Month month) {
    const auto it = counts.find(month);
    if (it == counts.end()) throw DataError("calendar month " + month.to_string() + " absent from the count table");
    return it->second;
}

// K distinct values from [0, n), Floyd's algorithm.
void choose_distinct(int n, int k, std::mt19937_64& rng, std::vector<char>& chosen) {
    chosen.assign(static_cast<std::size_t>(n), 0);
    for (int t = n - k; t < n; ++t) {
        std::uniform_int_distribution<int> pick(0, t);
        const int r = pick(rng);
        if (chosen[static_cast<std::size_t>(r)])
            chosen[static_cast<std::size_t>(t)] = 1;
        else
            chosen[static_cast<std::size_t>(r)] = 1;
    }
}

}  // namespace

void explode_full(const LoanHistory& history, const PanelSink& sink, int book_age_offset) {
    const int n = static_cast<int>(history.size());
    for (int s = 0; s < n; ++s) {
        for (int m = s; m < n; ++m) {
            PanelRow row;
            row.loan_id = history.origination.loan_id;
            row.snapshot_month = history.month_at(static_cast<std::size_t>(s));
            row.calendar_month = history.month_at(static_cast<std::size_t>(m));
            row.loan_age = m - s;
            row.snapshot_mob = s + book_age_offset;
            row.status = history.status[static_cast<std::size_t>(m)];
            row.weight = 1.0;
            sink(row);
        }
    }
}

std::vector<PanelRow> explode_full(const LoanHistory& history, int book_age_offset) {
    std::vector<PanelRow> rows;
    rows.reserve(static_cast<std::size_t>(exploded_size(static_cast<std::int64_t>(history.size()))));
    explode_full(history, [&](const PanelRow& r) { rows.push_back(r); }, book_age_offset);
    return rows;
}

void original_rows(const LoanHistory& history, const PanelSink& sink, int book_age_offset) {
    for (std::size_t m = 0; m < history.size(); ++m) {
        PanelRow row;
        row.loan_id = history.origination.loan_id;
        row.snapshot_month = history.first_month;
        row.calendar_month = history.month_at(m);
        row.loan_age = static_cast<int>(m);
        row.snapshot_mob = book_age_offset;
        row.status = history.status[m];
        sink(row);
    }
}

SamplingRateTable SamplingRateTable::defaults() {
    SamplingRateTable t;
    t.bad_tiers = {
        {1, 500, 1.0},       {501, 1000, 0.95},   {1001, 2000, 0.90}, {2001, 3000, 0.85},
        {3001, 4000, 0.80},  {4001, 5000, 0.75},  {5001, 6000, 0.70}, {6001, 0, 0.65},
    };
    t.good_tiers = {
        {1, 100000, 0.1},
        {100001, 200000, 0.1},
        {200001, 300000, 0.05},
        {300001, 400000, 0.033333333},
        {400001, 500000, 0.025},
        {500001, 600000, 0.02},
        {600001, 700000, 0.016666667},
        {700001, 800000, 0.014285714},
        {800001, 900000, 0.0125},
        {900001, 0, 0.011111111},
    };
    return t;
}

SamplingRateTable SamplingRateTable::keep_all() {
    SamplingRateTable t;
    t.bad_tiers = {{1, 0, 1.0}};
    t.good_tiers = {{1, 0, 1.0}};
    return t;
}

void SamplingRateTable::validate() const {
    validate_tiers(bad_tiers, "bad");
    validate_tiers(good_tiers, "good");
}

double rate_for(int status, std::int64_t monthly_count, const SamplingRateTable& table) {
    if (monthly_count < 1)
        throw DataError(std::string("a ") + (status == 1 ? "bad" : "good") +
                        " row falls in a month whose count of that status is " + std::to_string(monthly_count));
    const auto& tiers = status == 1 ? table.bad_tiers : table.good_tiers;
    for (const auto& t : tiers)
        if (t.contains(monthly_count)) return t.probability;
    throw std::invalid_argument("sampling tiers do not cover count " + std::to_string(monthly_count));
}

void sample_loan(const LoanHistory& history, const MonthlyCounts& counts, const SamplingRateTable& table,
                 std::uint64_t seed, const SamplingOptions& options, std::vector<PanelRow>& out) {
    out.clear();
    auto rng = substream(seed, history.origination.loan_id, kSampleStream);
    const int n = static_cast<int>(history.size());
    const std::string_view id = history.origination.loan_id;

    if (options.unit == SamplingUnit::snapshot_panel) {
        const std::uint8_t last_status = history.status.back();
        for (int s = 0; s < n; ++s) {
            const Month snap = history.month_at(static_cast<std::size_t>(s));
            const auto c = count_at(counts, snap).of(last_status);
            const double p = rate_for(last_status, std::max<std::int64_t>(c, 1), table);
            if (p < 1.0 && uniform01(rng) >= p) continue;
            for (int m = s; m < n; ++m) {
                out.push_back({id, snap, history.month_at(static_cast<std::size_t>(m)), m - s,
                               s + options.book_age_offset, history.status[static_cast<std::size_t>(m)], 1.0 / p});
            }
        }
        return;
    }

    std::vector<char> chosen;
    for (int j = 1; j <= n; ++j) {
        const auto idx = static_cast<std::size_t>(j - 1);
        const Month month = history.month_at(idx);
        const std::uint8_t st = history.status[idx];
        const double p = rate_for(st, count_at(counts, month).of(st), table);
        int k = j;
        if (p < 1.0) {
            std::binomial_distribution<int> draw(j, p);
            k = draw(rng);
        }
        if (k == 0) continue;
        if (k == j)
            chosen.assign(static_cast<std::size_t>(j), 1);
        else
            choose_distinct(j, k, rng, chosen);
        const double w = 1.0 / p;
        for (int age = 0; age < j; ++age) {
            if (!chosen[static_cast<std::size_t>(age)]) continue;
            const int snap_index = j - 1 - age;
            out.push_back({id, history.month_at(static_cast<std::size_t>(snap_index)), month, age,
                           snap_index + options.book_age_offset, st, w});
        }
    }
    std::sort(out.begin(), out.end(), [](const PanelRow& a, const PanelRow& b) {
        if (a.snapshot_month != b.snapshot_month) return a.snapshot_month < b.snapshot_month;
        return a.loan_age < b.loan_age;
    });
}

SampleSummary backward_weighted_sample(std::span<const LoanHistory> histories, const MonthlyCounts& counts,
                                       const SamplingRateTable& table, std::uint64_t seed, const PanelSink& sink,
                                       const SamplingOptions& options) {
    table.validate();
    SampleSummary summary;
    const std::size_t block = std::max<std::size_t>(options.block_size, 1);
    std::vector<std::vector<PanelRow>> buffers(block);
    for (std::size_t begin = 0; begin < histories.size(); begin += block) {
        const std::size_t end = std::min(histories.size(), begin + block);
        parallel_for(end - begin, options.threads, [&](std::size_t i) {
            sample_loan(histories[begin + i], counts, table, seed, options, buffers[i]);
        });
        for (std::size_t i = 0; i < end - begin; ++i) {
            const auto n = static_cast<std::int64_t>(histories[begin + i].size());
            summary.original_rows += n;
            summary.full_panel_rows += exploded_size(n);
            for (const auto& row : buffers[i]) {
                summary.total_weight += row.weight;
                sink(row);
            }
            summary.sampled_rows += static_cast<std::int64_t>(buffers[i].size());
        }
    }
    summary.loans = static_cast<std::int64_t>(histories.size());
    return summary;
}

std::string_view to_string(SplitSet s) { return s == SplitSet::train ? "train" : "test"; }

SplitAssignment stratified_split(std::span<const LoanHistory> histories, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw std::invalid_argument("train_fraction must lie in (0, 1)");
    SplitAssignment split;
    split.train_fraction = train_fraction;
    for (const Terminal stratum : {Terminal::good, Terminal::bad}) {
        std::vector<std::string> ids;
        for (const auto& h : histories)
            if (h.terminal() == stratum) ids.push_back(h.origination.loan_id);
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        auto rng = substream(seed, stratum == Terminal::bad ? "bad" : "good", kSplitStream);
        std::shuffle(ids.begin(), ids.end(), rng);
        const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(ids.size())));
        for (std::size_t i = 0; i < ids.size(); ++i)
            split.assignment[ids[i]] = i < n_train ? SplitSet::train : SplitSet::test;
    }
    return split;
}

}  // namespace hazscore
