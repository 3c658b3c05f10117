#include "hazscore/ingest.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "hazscore/delimited.hpp"

namespace hazscore {

namespace {

struct FieldReader {
    std::vector<std::string_view> fields;
    std::string error;

    std::string_view get(int column, std::string_view name) {
        if (!error.empty()) return {};
        if (column < 0 || static_cast<std::size_t>(column) >= fields.size()) {
            error = "missing column " + std::string(name);
            return {};
        }
        const auto v = trim(fields[static_cast<std::size_t>(column)]);
        if (v.empty()) error = "empty field " + std::string(name);
        return v;
    }

    double number(int column, std::string_view name) {
        const auto s = get(column, name);
        if (!error.empty()) return 0.0;
        const auto v = parse_double(s);
        if (!v) {
            error = "non-numeric field " + std::string(name) + " '" + std::string(s) + "'";
            return 0.0;
        }
        return *v;
    }

    std::int64_t integer(int column, std::string_view name) {
        const auto s = get(column, name);
        if (!error.empty()) return 0;
        const auto v = parse_int(s);
        if (!v) {
            error = "non-integer field " + std::string(name) + " '" + std::string(s) + "'";
            return 0;
        }
        return *v;
    }

    Month month(int column, std::string_view name) {
        const auto s = get(column, name);
        if (!error.empty()) return {};
        try {
            return Month::parse(s);
        } catch (const std::invalid_argument&) {
            error = "invalid month in field " + std::string(name) + " '" + std::string(s) + "'";
            return {};
        }
    }
};

template <class Row, class Map, class Fn>
ParseResult<Row> parse_file(const std::filesystem::path& path, const Map& map, Fn&& parse_record) {
    ParseResult<Row> result;
    LineReader reader(path);
    std::string line;
    bool header_pending = map.has_header;
    while (reader.next(line)) {
        if (header_pending) {
            header_pending = false;
            continue;
        }
        if (trim(line).empty()) continue;
        ++result.lines_read;
        Row row;
        if (auto reason = parse_record(line, map, row); reason.empty())
            result.rows.push_back(std::move(row));
        else
            result.rejections.push_back({reader.line_number(), std::move(reason)});
    }
    return result;
}

}  // namespace

std::string parse_loan_record(std::string_view line, const LoanColumnMap& map, LoanOrigination& out) {
    FieldReader r{split_fields(line, map.delimiter), {}};
    out.loan_id = std::string(r.get(map.loan_id, "loan_id"));
    out.orig_month = r.month(map.orig_month, "orig_month");
    const auto fico = r.integer(map.fico, "fico");
    out.dti = r.number(map.dti, "dti");
    out.cltv = r.number(map.cltv, "cltv");
    out.orig_upb = r.number(map.orig_upb, "orig_upb");
    out.orig_int_rt = r.number(map.orig_int_rt, "orig_int_rt");
    if (!r.error.empty()) return r.error;
    if (fico < 300 || fico > 850) return "fico out of range [300, 850]";
    out.fico = static_cast<int>(fico);
    if (out.dti < 0) return "dti negative";
    if (out.cltv <= 0) return "cltv not positive";
    if (out.orig_upb <= 0) return "orig_upb not positive";
    if (out.orig_int_rt <= 0) return "orig_int_rt not positive";
    return {};
}

std::string parse_performance_record(std::string_view line, const PerformanceColumnMap& map, PerformanceRow& out) {
    FieldReader r{split_fields(line, map.delimiter), {}};
    out.loan_id = std::string(r.get(map.loan_id, "loan_id"));
    out.month = r.month(map.month, "month");
    const auto dlq = r.integer(map.dlq_status, "dlq_status");
    if (!r.error.empty()) return r.error;
    if (dlq < 0) return "dlq_status negative";
    out.dlq_status = static_cast<int>(std::min<std::int64_t>(dlq, 999));
    return {};
}

ParseResult<LoanOrigination> parse_loans(const std::filesystem::path& path, const LoanColumnMap& map) {
    return parse_file<LoanOrigination>(path, map, parse_loan_record);
}

ParseResult<PerformanceRow> parse_performance(const std::filesystem::path& path, const PerformanceColumnMap& map) {
    return parse_file<PerformanceRow>(path, map, parse_performance_record);
}

LabelResult validate_and_label(std::span<const LoanOrigination> loans, std::span<const PerformanceRow> perf,
                               const LabelOptions& options) {
    const int window = options.horizon - options.clock_offset;
    if (window < 1) throw std::invalid_argument("horizon minus clock offset must be at least one month");
    if (options.bad_threshold < 1) throw std::invalid_argument("bad_threshold must be positive");

    LabelResult result;

    std::unordered_map<std::string_view, std::size_t> origin_index;
    std::unordered_map<std::string_view, int> origin_count;
    for (std::size_t i = 0; i < loans.size(); ++i) {
        origin_index.emplace(loans[i].loan_id, i);
        ++origin_count[loans[i].loan_id];
    }

    std::vector<std::size_t> order(perf.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (perf[a].loan_id != perf[b].loan_id) return perf[a].loan_id < perf[b].loan_id;
        return perf[a].month < perf[b].month;
    });

    std::unordered_map<std::string_view, bool> has_perf;
    for (std::size_t begin = 0; begin < order.size();) {
        const std::string& id = perf[order[begin]].loan_id;
        std::size_t end = begin;
        while (end < order.size() && perf[order[end]].loan_id == id) ++end;
        has_perf[id] = true;

        const auto it = origin_index.find(id);
        if (it == origin_index.end()) {
            result.exclusions.push_back({id, "performance without origination"});
        } else if (origin_count[id] > 1) {
            result.exclusions.push_back({id, "duplicate origination record"});
        } else {
            std::string problem;
            for (std::size_t k = begin + 1; k < end && problem.empty(); ++k) {
                const int step = perf[order[k]].month - perf[order[k - 1]].month;
                if (step == 0) problem = "duplicate performance month";
                else if (step != 1) problem = "inconsecutive performance months";
            }
            if (!problem.empty()) {
                result.exclusions.push_back({id, problem});
            } else {
                LoanHistory h;
                h.origination = loans[it->second];
                h.first_month = perf[order[begin]].month;
                const std::size_t limit = std::min<std::size_t>(end - begin, static_cast<std::size_t>(window));
                h.status.reserve(limit);
                for (std::size_t k = 0; k < limit; ++k) {
                    if (perf[order[begin + k]].dlq_status >= options.bad_threshold) {
                        h.status.push_back(1);
                        break;
                    }
                    h.status.push_back(0);
                }
                result.histories.push_back(std::move(h));
            }
        }
        begin = end;
    }

    for (const auto& loan : loans) {
        if (!has_perf.contains(loan.loan_id)) {
            result.exclusions.push_back({loan.loan_id, "no performance records"});
            has_perf[loan.loan_id] = true;
        }
    }

    std::sort(result.histories.begin(), result.histories.end(),
              [](const LoanHistory& a, const LoanHistory& b) { return a.origination.loan_id < b.origination.loan_id; });
    std::stable_sort(result.exclusions.begin(), result.exclusions.end(),
                     [](const Exclusion& a, const Exclusion& b) { return a.loan_id < b.loan_id; });
    return result;
}

std::vector<PerformanceRow> to_performance_rows(std::span<const LoanHistory> histories, int bad_threshold) {
    std::vector<PerformanceRow> out;
    for (const auto& h : histories)
        for (std::size_t i = 0; i < h.size(); ++i)
            out.push_back({h.origination.loan_id, h.month_at(i), h.status[i] == 1 ? bad_threshold : 0});
    return out;
}

void check_history(const LoanHistory& h, const LabelOptions& options) {
    const auto& id = h.origination.loan_id;
    if (h.status.empty()) throw DataError("history " + id + " is empty");
    if (static_cast<int>(h.size()) > options.horizon - options.clock_offset)
        throw DataError("history " + id + " extends past the horizon");
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (h.status[i] > 1) throw DataError("history " + id + " has a non-binary status");
        if (h.status[i] == 1 && i + 1 != h.size()) throw DataError("history " + id + " continues after its bad month");
    }
}

MonthlyCounts monthly_counts(std::span<const LoanHistory> histories) {
    MonthlyCounts counts;
    for (const auto& h : histories) {
        for (std::size_t i = 0; i < h.size(); ++i) {
            auto& c = counts[h.month_at(i)];
            if (h.status[i] == 1)
                ++c.n_bads;
            else
                ++c.n_goods;
        }
    }
    return counts;
}

Frequency parse_frequency(std::string_view s) {
    if (s == "monthly") return Frequency::monthly;
    if (s == "quarterly") return Frequency::quarterly;
    throw std::invalid_argument("unknown frequency '" + std::string(s) + "'");
}

std::string_view to_string(Frequency f) { return f == Frequency::monthly ? "monthly" : "quarterly"; }

std::optional<double> MacroSeries::value_at(Month month) const {
    const bool quarterly = frequency == Frequency::quarterly;
    const auto key_of = [quarterly](Month m) { return quarterly ? m.quarter_start() : m; };
    const Month key = key_of(month);
    const auto it = std::lower_bound(observations.begin(), observations.end(), key,
                                     [&](const MacroObservation& o, Month m) { return key_of(o.month) < m; });
    if (it == observations.end() || key_of(it->month) != key) return std::nullopt;
    return it->value;
}

void validate_macro(const MacroSeries& series) {
    if (series.observations.empty()) throw DataError("macro series " + series.name + " is empty");
    for (std::size_t i = 1; i < series.observations.size(); ++i) {
        const Month prev = series.observations[i - 1].month;
        const Month cur = series.observations[i].month;
        const bool quarterly = series.frequency == Frequency::quarterly;
        const Month a = quarterly ? prev.quarter_start() : prev;
        const Month b = quarterly ? cur.quarter_start() : cur;
        const int step = quarterly ? 3 : 1;
        if (b == a)
            throw DataError("macro series " + series.name + ": duplicate " + (quarterly ? "quarter " : "month ") +
                            cur.to_string());
        if (b < a) throw DataError("macro series " + series.name + ": dates not increasing at " + cur.to_string());
        if (b - a != step)
            throw DataError("macro series " + series.name + ": gap between " + prev.to_string() + " and " +
                            cur.to_string() + " for " + std::string(to_string(series.frequency)) + " frequency");
    }
}

MacroSeries load_macro(const std::filesystem::path& path, std::string name, Frequency frequency) {
    MacroSeries series;
    series.name = std::move(name);
    series.frequency = frequency;
    LineReader reader(path);
    std::string line;
    while (reader.next(line)) {
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line, ',');
        if (fields.size() < 2) throw DataError(path.string() + ":" + std::to_string(reader.line_number()) + ": expected month,value");
        Month m;
        try {
            m = Month::parse(trim(fields[0]));
        } catch (const std::invalid_argument&) {
            if (reader.line_number() == 1) continue;  // header
            throw DataError(path.string() + ":" + std::to_string(reader.line_number()) + ": bad month");
        }
        const auto v = parse_double(fields[1]);
        if (!v) throw DataError(path.string() + ":" + std::to_string(reader.line_number()) + ": non-numeric value");
        series.observations.push_back({m, *v});
    }
    validate_macro(series);
    return series;
}

}  // namespace hazscore
