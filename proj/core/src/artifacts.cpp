#include "hazscore/artifacts.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_map>

#include "hazscore/delimited.hpp"

namespace hazscore::artifacts {

namespace {

[[noreturn]] void malformed(const std::filesystem::path& path, std::size_t line, std::string_view what) {
    throw DataError(path.string() + ":" + std::to_string(line) + ": " + std::string(what));
}

template <class Fn>
void for_each_record(const std::filesystem::path& path, std::size_t min_fields, Fn&& fn) {
    LineReader reader(path);
    std::string line;
    bool header = true;
    while (reader.next(line)) {
        if (header) {
            header = false;
            continue;
        }
        if (line.empty()) continue;
        const auto fields = split_fields(line, ',');
        if (fields.size() < min_fields) malformed(path, reader.line_number(), "too few fields");
        fn(fields, reader.line_number());
    }
}

double need_double(const std::filesystem::path& path, std::size_t line, std::string_view s) {
    const auto v = parse_double(s);
    if (!v) malformed(path, line, "bad number '" + std::string(s) + "'");
    return *v;
}

std::int64_t need_int(const std::filesystem::path& path, std::size_t line, std::string_view s) {
    const auto v = parse_int(s);
    if (!v) malformed(path, line, "bad integer '" + std::string(s) + "'");
    return *v;
}

Month need_month(const std::filesystem::path& path, std::size_t line, std::string_view s) {
    try {
        return Month::parse(s);
    } catch (const std::invalid_argument&) {
        malformed(path, line, "bad month '" + std::string(s) + "'");
    }
}

}  // namespace

void write_originations(const std::filesystem::path& path, std::span<const LoanOrigination> loans) {
    DelimitedWriter w(path);
    w.header({"loan_id", "orig_month", "fico", "dti", "cltv", "orig_upb", "orig_int_rt"});
    for (const auto& l : loans) {
        w.field(l.loan_id).field(l.orig_month.to_string()).field(l.fico).field(l.dti).field(l.cltv);
        w.field(l.orig_upb).field(l.orig_int_rt);
        w.end_row();
    }
    w.close();
}

std::vector<LoanOrigination> read_originations(const std::filesystem::path& path) {
    std::vector<LoanOrigination> out;
    for_each_record(path, 7, [&](const auto& f, std::size_t line) {
        LoanOrigination l;
        l.loan_id = std::string(f[0]);
        l.orig_month = need_month(path, line, f[1]);
        l.fico = static_cast<int>(need_int(path, line, f[2]));
        l.dti = need_double(path, line, f[3]);
        l.cltv = need_double(path, line, f[4]);
        l.orig_upb = need_double(path, line, f[5]);
        l.orig_int_rt = need_double(path, line, f[6]);
        out.push_back(std::move(l));
    });
    return out;
}

void write_histories(const std::filesystem::path& path, std::span<const LoanHistory> histories) {
    DelimitedWriter w(path);
    w.header({"loan_id", "month", "status"});
    for (const auto& h : histories) {
        for (std::size_t i = 0; i < h.size(); ++i) {
            w.field(h.origination.loan_id).field(h.month_at(i).to_string()).field(static_cast<int>(h.status[i]));
            w.end_row();
        }
    }
    w.close();
}

std::vector<LoanHistory> read_histories(const std::filesystem::path& path, std::span<const LoanOrigination> loans) {
    std::unordered_map<std::string_view, const LoanOrigination*> by_id;
    for (const auto& l : loans) by_id.emplace(l.loan_id, &l);
    std::vector<LoanHistory> out;
    for_each_record(path, 3, [&](const auto& f, std::size_t line) {
        const Month m = need_month(path, line, f[1]);
        const auto st = need_int(path, line, f[2]);
        if (st != 0 && st != 1) malformed(path, line, "status must be 0 or 1");
        if (out.empty() || out.back().origination.loan_id != f[0]) {
            const auto it = by_id.find(f[0]);
            if (it == by_id.end()) malformed(path, line, "loan " + std::string(f[0]) + " has no origination record");
            LoanHistory h;
            h.origination = *it->second;
            h.first_month = m;
            out.push_back(std::move(h));
        }
        auto& h = out.back();
        if (m != h.first_month + static_cast<int>(h.size())) malformed(path, line, "history months not consecutive");
        h.status.push_back(static_cast<std::uint8_t>(st));
    });
    return out;
}

void write_exclusions(const std::filesystem::path& path, std::span<const Exclusion> exclusions) {
    DelimitedWriter w(path);
    w.header({"loan_id", "reason"});
    for (const auto& e : exclusions) {
        w.field(e.loan_id).field(e.reason);
        w.end_row();
    }
    w.close();
}

void write_counts(const std::filesystem::path& path, const MonthlyCounts& counts) {
    DelimitedWriter w(path);
    w.header({"month", "n_bads", "n_goods"});
    for (const auto& [m, c] : counts) {
        w.field(m.to_string()).field(c.n_bads).field(c.n_goods);
        w.end_row();
    }
    w.close();
}

MonthlyCounts read_counts(const std::filesystem::path& path) {
    MonthlyCounts counts;
    for_each_record(path, 3, [&](const auto& f, std::size_t line) {
        counts[need_month(path, line, f[0])] = {need_int(path, line, f[1]), need_int(path, line, f[2])};
    });
    return counts;
}

void write_split(const std::filesystem::path& path, const SplitAssignment& split) {
    std::vector<std::pair<std::string, SplitSet>> rows(split.assignment.begin(), split.assignment.end());
    std::sort(rows.begin(), rows.end());
    DelimitedWriter w(path);
    w.header({"loan_id", "set"});
    for (const auto& [id, set] : rows) {
        w.field(id).field(to_string(set));
        w.end_row();
    }
    w.close();
}

SplitAssignment read_split(const std::filesystem::path& path) {
    SplitAssignment split;
    for_each_record(path, 2, [&](const auto& f, std::size_t line) {
        if (f[1] != "train" && f[1] != "test") malformed(path, line, "set must be train or test");
        split.assignment[std::string(f[0])] = f[1] == "train" ? SplitSet::train : SplitSet::test;
    });
    return split;
}

PanelWriter::PanelWriter(const std::filesystem::path& path) : out_(path) {
    out_.header({"loan_id", "snapshot_month", "calendar_month", "loan_age", "snapshot_mob", "status", "weight"});
}

void PanelWriter::write(const PanelRow& r) {
    out_.field(r.loan_id).field(r.snapshot_month.to_string()).field(r.calendar_month.to_string());
    out_.field(r.loan_age).field(r.snapshot_mob).field(static_cast<int>(r.status)).field(r.weight);
    out_.end_row();
}

void read_panel(const std::filesystem::path& path, const std::function<void(const PanelRow&)>& sink) {
    for_each_record(path, 7, [&](const auto& f, std::size_t line) {
        PanelRow r;
        r.loan_id = f[0];
        r.snapshot_month = need_month(path, line, f[1]);
        r.calendar_month = need_month(path, line, f[2]);
        r.loan_age = static_cast<int>(need_int(path, line, f[3]));
        r.snapshot_mob = static_cast<int>(need_int(path, line, f[4]));
        r.status = static_cast<std::uint8_t>(need_int(path, line, f[5]));
        r.weight = need_double(path, line, f[6]);
        sink(r);
    });
}

DesignWriter::DesignWriter(const std::filesystem::path& path, const std::vector<std::string>& names) : out_(path) {
    std::vector<std::string> header{"loan_id", "calendar_month", "status", "weight"};
    header.insert(header.end(), names.begin(), names.end());
    out_.header(header);
}

void DesignWriter::write(std::string_view loan_id, Month month, int status, double weight,
                         std::span<const double> features) {
    out_.field(loan_id).field(month.to_string()).field(status).field(weight);
    for (double v : features) out_.field(v);
    out_.end_row();
}

DesignFile read_design(const std::filesystem::path& path) {
    LineReader reader(path);
    std::string line;
    if (!reader.next(line)) throw DataError(path.string() + ": empty design file");
    const auto header = split_fields(line, ',');
    if (header.size() < 4) throw DataError(path.string() + ": design header too short");
    std::vector<std::string> names(header.begin() + 4, header.end());
    DesignFile out{DesignMatrix(names), {}, {}};
    std::vector<double> x(names.size());
    while (reader.next(line)) {
        if (line.empty()) continue;
        const auto f = split_fields(line, ',');
        if (f.size() != header.size()) malformed(path, reader.line_number(), "wrong field count");
        for (std::size_t j = 0; j < names.size(); ++j) x[j] = need_double(path, reader.line_number(), f[j + 4]);
        out.design.add_row(x, static_cast<int>(need_int(path, reader.line_number(), f[2])),
                           need_double(path, reader.line_number(), f[3]));
        out.loan_ids.emplace_back(f[0]);
        out.months.push_back(need_month(path, reader.line_number(), f[1]));
    }
    return out;
}

void write_json(const std::filesystem::path& path, const Json& doc) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    return Json::parse(in);
}

Json model_to_json(const CoefficientTable& table, const std::string& feature_spec_hash) {
    Json names = Json::array(), est = Json::array(), se = Json::array();
    for (const auto& c : table.coefficients) {
        names.push_back(c.name);
        est.push_back(c.estimate);
        se.push_back(c.standard_error);
    }
    return {{"names", names},
            {"estimates", est},
            {"standard_errors", se},
            {"feature_spec_hash", feature_spec_hash},
            {"fit",
             {{"iterations", table.iterations},
              {"gradient_max", table.gradient_max},
              {"log_likelihood", table.log_likelihood},
              {"weight_sum", table.weight_sum},
              {"rows", table.rows},
              {"information_condition", table.information_condition}}}};
}

CoefficientTable model_from_json(const Json& doc) {
    CoefficientTable t;
    const auto names = doc.at("names").get<std::vector<std::string>>();
    const auto est = doc.at("estimates").get<std::vector<double>>();
    const auto se = doc.at("standard_errors").get<std::vector<double>>();
    if (names.size() != est.size() || names.size() != se.size()) throw DataError("model file arrays differ in length");
    for (std::size_t j = 0; j < names.size(); ++j) t.coefficients.push_back(make_coefficient(names[j], est[j], se[j]));
    const auto& fit = doc.at("fit");
    t.iterations = fit.value("iterations", 0);
    t.gradient_max = fit.value("gradient_max", 0.0);
    t.log_likelihood = fit.value("log_likelihood", 0.0);
    t.weight_sum = fit.value("weight_sum", 0.0);
    t.rows = fit.value("rows", std::int64_t{0});
    t.information_condition = fit.value("information_condition", 0.0);
    return t;
}

void write_coefficients_csv(const std::filesystem::path& path, const CoefficientTable& table) {
    DelimitedWriter w(path);
    w.header({"Parameter", "Estimate", "Standard Error", "Wald Chi-Square", "Pr > ChiSq"});
    for (const auto& c : table.coefficients) {
        w.field(c.name).field(c.estimate).field(c.standard_error).field(c.wald_chi_square).field(c.p_value);
        w.end_row();
    }
    w.close();
}

}  // namespace hazscore::artifacts
