#include "hazscore/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "hazscore/artifacts.hpp"
#include "hazscore/delimited.hpp"

namespace hazscore {

namespace fs = std::filesystem;

namespace {

using Stats = Json;

fs::path need(const PipelineConfig& cfg, const char* file, std::string_view producer) {
    auto p = cfg.out_dir / file;
    if (!fs::exists(p)) throw StageError("missing " + std::string(file) + "; run " + std::string(producer) + " first");
    return p;
}

void need_input(const fs::path& p, std::string_view what) {
    if (p.empty()) throw StageError(std::string(what) + " path is not configured");
    if (!fs::exists(p)) throw StageError(std::string(what) + " not found: " + p.string());
}

std::string file_digest(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return hex_digest(ss.str());
}

void record(const PipelineConfig& cfg, std::string_view stage, const Stats& stats, double ms) {
    const auto path = cfg.out_dir / files::manifest;
    Json manifest = fs::exists(path) ? artifacts::read_json(path) : Json::object();
    manifest["config_hash"] = cfg.hash();
    manifest["seed"] = cfg.seed;
    manifest["stages"][std::string(stage)] = stats;
    manifest["timings_ms"][std::string(stage)] = ms;
    artifacts::write_json(path, manifest);
}

std::vector<LoanHistory> load_histories(const PipelineConfig& cfg, std::string_view stage_hint = "ingest") {
    const auto loans = artifacts::read_originations(need(cfg, files::origination, stage_hint));
    return artifacts::read_histories(need(cfg, files::histories, stage_hint), loans);
}

MacroSet load_macros(const PipelineConfig& cfg) {
    MacroSet set;
    for (const auto& src : cfg.macro_series) {
        const auto path = cfg.macro_dir / src.file;
        need_input(path, "macro file for " + src.name);
        set.emplace(src.name, load_macro(path, src.name, src.frequency));
    }
    return set;
}

struct YearTally {
    std::int64_t loans = 0, goods = 0, bads = 0, observations = 0;
};

void add_tally(YearTally& t, const LoanHistory& h) {
    ++t.loans;
    (h.terminal_bad() ? t.bads : t.goods) += 1;
    t.observations += static_cast<std::int64_t>(h.size());
}

// ---------------------------------------------------------------- stages

Stats stage_synth(const PipelineConfig& cfg) {
    if (!cfg.synth) throw StageError("config has no synth section");
    auto spec = *cfg.synth;
    spec.seed = cfg.seed;
    spec.horizon = cfg.labeling.horizon;
    spec.bad_threshold = cfg.labeling.bad_threshold;
    spec.book_age_offset = cfg.book_age_offset;
    if (cfg.loans.empty() || cfg.performance.empty() || cfg.macro_dir.empty())
        throw StageError("synth needs paths.loans, paths.performance and paths.macro_dir");
    for (const auto& src : cfg.macro_series)
        if (std::none_of(spec.macro_paths.begin(), spec.macro_paths.end(),
                         [&](const MacroPath& p) { return p.name == src.name; }))
            throw StageError("synth has no macro path for configured series " + src.name);
    const auto portfolio = generate(spec);
    write_portfolio(portfolio, {cfg.loans, cfg.performance, cfg.macro_dir});
    // macro files are written as <name>.csv; configured names must match
    for (const auto& src : cfg.macro_series)
        if (src.file != src.name + ".csv") fs::copy_file(cfg.macro_dir / (src.name + ".csv"), cfg.macro_dir / src.file,
                                                         fs::copy_options::overwrite_existing);
    return {{"loans", portfolio.loans.size()}, {"performance_rows", portfolio.performance.size()},
            {"macro_series", portfolio.macros.size()}};
}

Stats stage_ingest(const PipelineConfig& cfg) {
    need_input(cfg.loans, "loan file");
    need_input(cfg.performance, "performance file");
    const auto loans = parse_loans(cfg.loans, cfg.loan_columns);
    const auto perf = parse_performance(cfg.performance, cfg.performance_columns);
    const auto labeled = validate_and_label(loans.rows, perf.rows, cfg.labeling);

    std::vector<LoanOrigination> kept;
    kept.reserve(labeled.histories.size());
    std::map<int, YearTally> by_year;
    std::int64_t observations = 0;
    for (const auto& h : labeled.histories) {
        kept.push_back(h.origination);
        add_tally(by_year[h.origination.orig_month.year()], h);
        observations += static_cast<std::int64_t>(h.size());
    }
    artifacts::write_originations(cfg.out_dir / files::origination, kept);
    artifacts::write_histories(cfg.out_dir / files::histories, labeled.histories);
    artifacts::write_exclusions(cfg.out_dir / files::exclusions, labeled.exclusions);
    {
        DelimitedWriter w(cfg.out_dir / files::rejections);
        w.header({"file", "line", "reason"});
        for (const auto& [label, list] : {std::pair{"loans", &loans.rejections}, std::pair{"performance", &perf.rejections}}) {
            for (const auto& r : *list) {
                std::string reason = r.reason;
                std::replace(reason.begin(), reason.end(), ',', ';');
                w.field(label).field(r.line).field(reason);
                w.end_row();
            }
        }
        w.close();
    }
    {
        DelimitedWriter w(cfg.out_dir / files::portfolio_summary);
        w.header({"year", "loans", "goods", "bads", "observations"});
        for (const auto& [year, t] : by_year) {
            w.field(year).field(t.loans).field(t.goods).field(t.bads).field(t.observations);
            w.end_row();
        }
        w.close();
    }
    return {{"loan_lines", loans.lines_read},        {"loan_rejections", loans.rejections.size()},
            {"performance_lines", perf.lines_read}, {"performance_rejections", perf.rejections.size()},
            {"histories", labeled.histories.size()}, {"exclusions", labeled.exclusions.size()},
            {"observations", observations}};
}

Stats stage_counts(const PipelineConfig& cfg) {
    const auto histories = load_histories(cfg);
    const auto counts = monthly_counts(histories);
    artifacts::write_counts(cfg.out_dir / files::monthly_counts, counts);
    std::int64_t bads = 0, goods = 0;
    for (const auto& [m, c] : counts) {
        bads += c.n_bads;
        goods += c.n_goods;
    }
    return {{"months", counts.size()}, {"bad_rows", bads}, {"good_rows", goods}};
}

Stats stage_split(const PipelineConfig& cfg) {
    const auto histories = load_histories(cfg);
    const auto split = stratified_split(histories, cfg.train_fraction, cfg.seed);
    artifacts::write_split(cfg.out_dir / files::split, split);
    std::map<std::pair<std::string, int>, YearTally> tally;
    std::int64_t train = 0, test = 0;
    for (const auto& h : histories) {
        const auto set = split.at(h.origination.loan_id);
        (set == SplitSet::train ? train : test) += 1;
        add_tally(tally[{std::string(to_string(set)), h.origination.orig_month.year()}], h);
    }
    DelimitedWriter w(cfg.out_dir / files::split_summary);
    w.header({"set", "year", "loans", "goods", "bads", "observations"});
    for (const auto& set : {"train", "test"})
        for (const auto& [key, t] : tally)
            if (key.first == set) {
                w.field(key.first).field(key.second).field(t.loans).field(t.goods).field(t.bads).field(t.observations);
                w.end_row();
            }
    w.close();
    return {{"train_loans", train}, {"test_loans", test}};
}

Stats stage_sample(const PipelineConfig& cfg) {
    const auto histories = load_histories(cfg);
    const auto split = artifacts::read_split(need(cfg, files::split, "split"));
    std::vector<LoanHistory> train, test;
    for (const auto& h : histories) {
        const auto it = split.assignment.find(h.origination.loan_id);
        if (it == split.assignment.end()) throw StageError("loan " + h.origination.loan_id + " missing from split; rerun split");
        (it->second == SplitSet::train ? train : test).push_back(h);
    }
    const auto counts = monthly_counts(train);
    artifacts::write_counts(cfg.out_dir / files::train_counts, counts);

    SamplingOptions opts;
    opts.unit = cfg.sampling_unit;
    opts.book_age_offset = cfg.book_age_offset;
    opts.threads = cfg.threads;
    artifacts::PanelWriter sampled(cfg.out_dir / files::sampled_panel);
    const auto summary =
        backward_weighted_sample(train, counts, cfg.sampling, cfg.seed, [&](const PanelRow& r) { sampled.write(r); }, opts);
    sampled.close();

    artifacts::PanelWriter test_out(cfg.out_dir / files::test_panel);
    std::int64_t test_rows = 0;
    for (const auto& h : test)
        original_rows(h, [&](const PanelRow& r) {
            test_out.write(r);
            ++test_rows;
        }, cfg.book_age_offset);
    test_out.close();

    DelimitedWriter w(cfg.out_dir / files::sample_summary);
    w.header({"data", "observations", "weights"});
    w.field("original_train").field(summary.original_rows).field("").end_row();
    w.field("full_exploded_panel").field(summary.full_panel_rows).field("").end_row();
    w.field("backward_weighted_sample").field(summary.sampled_rows).field(summary.total_weight).end_row();
    w.close();
    return {{"train_loans", train.size()},
            {"original_train_rows", summary.original_rows},
            {"full_panel_rows", summary.full_panel_rows},
            {"sampled_rows", summary.sampled_rows},
            {"sampled_weight", summary.total_weight},
            {"test_rows", test_rows}};
}

bool wants_bivariate(const std::string& name) {
    return name.find("_pspline") == std::string::npos && name != "covid_index" && name != "quarter1" &&
           name != "quarter3";
}

Stats stage_features(const PipelineConfig& cfg) {
    const auto histories = load_histories(cfg);
    const auto split = artifacts::read_split(need(cfg, files::split, "split"));
    const auto sampled_path = need(cfg, files::sampled_panel, "sample");
    const auto test_path = need(cfg, files::test_panel, "sample");
    need_input(cfg.macro_dir, "macro directory");
    const auto macros = load_macros(cfg);

    std::unordered_map<std::string, const LoanOrigination*> loan_of;
    for (const auto& h : histories) loan_of.emplace(h.origination.loan_id, &h.origination);
    const auto lookup = [&](std::string_view id) -> const LoanOrigination& {
        const auto it = loan_of.find(std::string(id));
        if (it == loan_of.end()) throw StageError("panel row for unknown loan " + std::string(id));
        return *it->second;
    };

    FeatureSpec spec = cfg.features;
    Stats stats;
    if (cfg.interaction_mode == InteractionMode::fit) {
        std::vector<InteractionObservation> obs;
        artifacts::read_panel(sampled_path, [&](const PanelRow& r) {
            const auto& l = lookup(r.loan_id);
            obs.push_back({static_cast<double>(l.fico), l.orig_upb, r.status, r.weight});
        });
        const auto fit = fit_interaction(obs, cfg.n_fico_groups, cfg.n_upb_groups);
        spec.interaction = fit.spec;
        DelimitedWriter w(cfg.out_dir / files::interaction_table);
        std::vector<std::string> header{"upb_group", "upb_lo"};
        for (int f = 1; f <= cfg.n_fico_groups; ++f) header.push_back("fico_group" + std::to_string(f));
        header.insert(header.end(), {"slope", "multiplier"});
        w.header(header);
        for (std::size_t g = 0; g < fit.bad_rates.size(); ++g) {
            w.field(g + 1).field(g == 0 ? 0.0 : fit.spec.upb_band_edges[g - 1]);
            for (double r : fit.bad_rates[g]) w.field(r);
            w.field(fit.spec.slopes[g]).field(fit.spec.band_multipliers[g]).end_row();
        }
        w.field("fico_edges").field("");
        for (double e : fit.fico_edges) w.field(e);
        w.end_row();
        w.close();
        stats["average_slope"] = fit.spec.average_slope;
    }
    const auto spec_json = to_json(spec);
    artifacts::write_json(cfg.out_dir / files::feature_spec, spec_json);
    const auto names = spec.names();

    std::map<std::pair<std::string, std::string>, std::int64_t> flagged;
    DesignMatrix train_design(names);
    std::vector<double> train_upb;

    const auto build = [&](const fs::path& in, const char* out_name, std::string_view dataset, bool keep) {
        artifacts::DesignWriter out(cfg.out_dir / out_name, names);
        std::int64_t rows = 0;
        artifacts::read_panel(in, [&](const PanelRow& r) {
            const auto& loan = lookup(r.loan_id);
            const auto a = assemble(r, loan, macros, spec);
            if (!a.ok()) {
                ++flagged[{std::string(dataset), std::string(to_string(a.flag)) + " (" + a.flagged_series + ")"}];
                return;
            }
            out.write(r.loan_id, r.calendar_month, r.status, r.weight, a.features.values);
            ++rows;
            if (keep) {
                train_design.add_row(a.features.values, r.status, r.weight);
                train_upb.push_back(loan.orig_upb);
            }
        });
        out.close();
        return rows;
    };
    stats["train_design_rows"] = build(sampled_path, files::train_design, "train", true);
    stats["test_design_rows"] = build(test_path, files::test_design, "test", false);

    {
        artifacts::DesignWriter out(cfg.out_dir / files::loan_design, names);
        std::int64_t rows = 0;
        for (const auto& h : histories) {
            PanelRow r;
            r.loan_id = h.origination.loan_id;
            r.snapshot_month = r.calendar_month = h.first_month;
            r.snapshot_mob = cfg.book_age_offset;
            const auto a = assemble(r, h.origination, macros, spec);
            if (!a.ok()) {
                ++flagged[{"loan", std::string(to_string(a.flag)) + " (" + a.flagged_series + ")"}];
                continue;
            }
            out.write(r.loan_id, r.calendar_month, h.terminal_bad() ? 1 : 0, 1.0, a.features.values);
            ++rows;
        }
        out.close();
        stats["loan_design_rows"] = rows;
    }
    {
        DelimitedWriter w(cfg.out_dir / files::feature_exclusions);
        w.header({"dataset", "reason", "rows"});
        for (const auto& [key, n] : flagged) w.field(key.first).field(key.second).field(n).end_row();
        w.close();
    }
    if (train_design.rows() > 0) {
        const auto corr = correlation_matrix(train_design);
        DelimitedWriter w(cfg.out_dir / files::collinearity);
        std::vector<std::string> header{"regressor"};
        header.insert(header.end(), names.begin(), names.end());
        w.header(header);
        for (std::size_t a = 0; a < names.size(); ++a) {
            w.field(names[a]);
            for (std::size_t b = 0; b < names.size(); ++b) w.field(corr[a * names.size() + b]);
            w.end_row();
        }
        w.close();

        const auto write_table = [&](const std::string& name, const std::vector<BivariateObservation>& obs) {
            const auto bins = bivariate_logodds_table(obs, cfg.bivariate_bins);
            DelimitedWriter bw(cfg.out_dir / files::bivariate_dir / (name + ".csv"));
            bw.header({"bin", "lo", "hi", "rows", "weight", "bad_rate", "log_odds", "defined"});
            for (std::size_t k = 0; k < bins.size(); ++k) {
                const auto& b = bins[k];
                bw.field(k + 1).field(b.lo).field(b.hi).field(b.rows).field(b.weight).field(b.bad_rate);
                if (b.defined)
                    bw.field(b.log_odds);
                else
                    bw.field("");
                bw.field(b.defined ? 1 : 0).end_row();
            }
            bw.close();
        };
        std::vector<BivariateObservation> obs(train_design.rows());
        for (std::size_t j = 0; j < names.size(); ++j) {
            if (!wants_bivariate(names[j])) continue;
            for (std::size_t i = 0; i < train_design.rows(); ++i)
                obs[i] = {train_design.row(i)[j], train_design.status(i), train_design.weight(i)};
            write_table(names[j], obs);
        }
        for (std::size_t i = 0; i < train_design.rows(); ++i)
            obs[i] = {train_upb[i], train_design.status(i), train_design.weight(i)};
        write_table("orig_upb", obs);
    }
    stats["flagged_rows"] = std::accumulate(flagged.begin(), flagged.end(), std::int64_t{0},
                                            [](std::int64_t s, const auto& kv) { return s + kv.second; });
    (void)split;
    return stats;
}

struct LoadedModel {
    CoefficientTable table;
    std::vector<double> beta;
};

LoadedModel load_model(const PipelineConfig& cfg, const std::vector<std::string>& design_names) {
    const auto doc = artifacts::read_json(need(cfg, files::model, "fit"));
    LoadedModel m{artifacts::model_from_json(doc), {}};
    m.beta = m.table.estimates();
    const auto spec_hash = file_digest(need(cfg, files::feature_spec, "features"));
    if (doc.at("feature_spec_hash").get<std::string>() != spec_hash)
        throw StageError("model was fitted against a different feature spec; run fit again");
    const auto names = m.table.names();
    if (names.size() != design_names.size() + 1 || !std::equal(design_names.begin(), design_names.end(), names.begin() + 1))
        throw StageError("model regressors do not match the design columns; run fit again");
    return m;
}

Stats stage_fit(const PipelineConfig& cfg) {
    const auto spec_path = need(cfg, files::feature_spec, "features");
    const auto data = artifacts::read_design(need(cfg, files::train_design, "features"));
    auto options = cfg.fit;
    options.threads = cfg.threads;
    const auto table = fit(data.design, options);
    artifacts::write_coefficients_csv(cfg.out_dir / files::coefficients, table);
    artifacts::write_json(cfg.out_dir / files::model, artifacts::model_to_json(table, file_digest(spec_path)));
    std::ofstream(cfg.out_dir / files::wald_report, std::ios::binary) << wald_report(table);
    return {{"rows", table.rows},
            {"parameters", table.coefficients.size()},
            {"iterations", table.iterations},
            {"log_likelihood", table.log_likelihood}};
}

Json backtest_json(const BacktestReport& r) {
    return {{"months", r.months.size()},
            {"mae", r.mae},
            {"rmse", r.rmse},
            {"mape", r.mape ? Json(*r.mape) : Json(nullptr)},
            {"mape_excluded_months", r.mape_excluded_months}};
}

BacktestReport run_backtest(const artifacts::DesignFile& data, const std::vector<double>& beta, const fs::path& out) {
    std::vector<BacktestRow> rows(data.design.rows());
    for (std::size_t i = 0; i < rows.size(); ++i)
        rows[i] = {data.months[i], data.design.status(i), data.design.weight(i), predict_hazard(data.design.row(i), beta)};
    const auto report = backtest(rows);
    DelimitedWriter w(out);
    w.header({"month", "rows", "weight", "actual", "predicted"});
    for (const auto& m : report.months)
        w.field(m.month.to_string()).field(m.rows).field(m.weight).field(m.actual).field(m.predicted).end_row();
    w.close();
    return report;
}

Stats stage_backtest(const PipelineConfig& cfg) {
    const auto train = artifacts::read_design(need(cfg, files::train_design, "features"));
    const auto test = artifacts::read_design(need(cfg, files::test_design, "features"));
    const auto model = load_model(cfg, train.design.names());
    const auto r_train = run_backtest(train, model.beta, cfg.out_dir / files::backtest_train);
    Json summary = {{"train", backtest_json(r_train)}};
    if (test.design.rows() > 0) summary["test"] = backtest_json(run_backtest(test, model.beta, cfg.out_dir / files::backtest_test));
    artifacts::write_json(cfg.out_dir / files::backtest_summary, summary);
    return summary;
}

Stats stage_score(const PipelineConfig& cfg) {
    const auto train = artifacts::read_design(need(cfg, files::train_design, "features"));
    const auto loans = artifacts::read_design(need(cfg, files::loan_design, "features"));
    const auto split = artifacts::read_split(need(cfg, files::split, "split"));
    const auto model = load_model(cfg, train.design.names());

    std::vector<double> hazards(train.design.rows());
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < hazards.size(); ++i) {
        hazards[i] = predict_hazard(train.design.row(i), model.beta);
        const double lodds = std::log(hazards[i] / (1.0 - hazards[i]));
        lo = std::min(lo, lodds);
        hi = std::max(hi, lodds);
    }
    ScoreScale scale = cfg.score_scale;
    if (cfg.score_bounds_from_train) {
        if (!(hi > lo)) throw StageError("train predictions are constant; cannot calibrate the score range");
        scale = ScoreScale::range_calibrated(lo, hi);
        scale.min_score = cfg.score_scale.min_score;
        scale.max_score = cfg.score_scale.max_score;
    }
    artifacts::write_json(cfg.out_dir / files::score_scale, to_json(scale));

    std::vector<ScoredRow> rows(hazards.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        rows[i] = {to_score(hazards[i], scale), train.design.status(i), train.design.weight(i), hazards[i]};
    const auto bands = score_band_table(rows, cfg.band_width, static_cast<int>(scale.min_score),
                                        static_cast<int>(scale.max_score));
    {
        DelimitedWriter w(cfg.out_dir / files::band_table);
        w.header({"score_lo", "score_hi", "bads_weighted", "goods_weighted", "total_weighted", "mean_predicted_hazard"});
        for (const auto& b : bands)
            w.field(b.lo).field(b.hi).field(b.bads).field(b.goods).field(b.total).field(b.mean_hazard).end_row();
        w.close();
    }
    DelimitedWriter w(cfg.out_dir / files::loan_scores);
    w.header({"loan_id", "set", "hazard", "score", "status"});
    for (std::size_t i = 0; i < loans.design.rows(); ++i) {
        const double h = predict_hazard(loans.design.row(i), model.beta);
        const auto it = split.assignment.find(loans.loan_ids[i]);
        if (it == split.assignment.end()) throw StageError("loan " + loans.loan_ids[i] + " missing from split");
        w.field(loans.loan_ids[i]).field(to_string(it->second)).field(h).field(to_score(h, scale));
        w.field(loans.design.status(i)).end_row();
    }
    w.close();
    return {{"train_rows", rows.size()}, {"loans", loans.design.rows()}, {"logodds_lo", scale.logodds_lo},
            {"logodds_hi", scale.logodds_hi}};
}

struct LoanScore {
    std::string loan_id;
    SplitSet set;
    double hazard;
    int score;
    int status;
};

std::vector<LoanScore> read_loan_scores(const fs::path& path) {
    std::vector<LoanScore> out;
    LineReader reader(path);
    std::string line;
    reader.next(line);
    while (reader.next(line)) {
        const auto f = split_fields(line, ',');
        if (f.size() != 5) throw DataError(path.string() + ": malformed loan score row");
        out.push_back({std::string(f[0]), f[1] == "train" ? SplitSet::train : SplitSet::test, parse_double(f[2]).value_or(0.0),
                       static_cast<int>(parse_int(f[3]).value_or(0)), static_cast<int>(parse_int(f[4]).value_or(0))});
    }
    return out;
}

Stats stage_cutoff(const PipelineConfig& cfg) {
    const auto scores = read_loan_scores(need(cfg, files::loan_scores, "score"));
    const auto scale = score_scale_from_json(artifacts::read_json(need(cfg, files::score_scale, "score")));
    std::vector<int> labels;
    std::vector<double> weights, preds;
    for (const auto& s : scores) {
        if (s.set != SplitSet::train) continue;
        labels.push_back(s.status);
        weights.push_back(1.0);
        preds.push_back(s.hazard);
    }
    const auto curve = roc(labels, weights, preds);
    const auto best = youden_cutoff(curve);
    {
        DelimitedWriter w(cfg.out_dir / files::roc);
        w.header({"threshold", "tpr", "fpr"});
        for (const auto& p : curve.points) w.field(p.threshold).field(p.tpr).field(p.fpr).end_row();
        w.close();
    }
    const Json out = {{"threshold_hazard", best.threshold},
                      {"youden_j", best.j},
                      {"tpr", best.tpr},
                      {"fpr", best.fpr},
                      {"cutoff_score", to_score(best.threshold, scale)},
                      {"auc", curve.auc},
                      {"train_loans", labels.size()}};
    artifacts::write_json(cfg.out_dir / files::cutoff, out);
    return out;
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Stats stage_report(const PipelineConfig& cfg) {
    const auto scores = read_loan_scores(need(cfg, files::loan_scores, "score"));
    const auto cutoff = artifacts::read_json(need(cfg, files::cutoff, "cutoff"));
    std::vector<ScoredRow> test;
    for (const auto& s : scores)
        if (s.set == SplitSet::test) test.push_back({s.score, s.status, 1.0, s.hazard});

    std::set<int> cutoffs(cfg.cutoffs.begin(), cfg.cutoffs.end());
    const int youden_score = cutoff.at("cutoff_score").get<int>();
    cutoffs.insert(youden_score);

    Json confusion = Json::array();
    std::vector<std::pair<int, ClassificationMetrics>> metrics;
    for (int c : cutoffs) {
        const auto m = confusion_at(test, c);
        const auto k = classification_metrics(m);
        metrics.emplace_back(c, k);
        confusion.push_back({{"cutoff", c},
                             {"youden", c == youden_score},
                             {"tn", m.tn},
                             {"fp", m.fp},
                             {"fn", m.fn},
                             {"tp", m.tp},
                             {"predicted_bads", m.fp + m.tp},
                             {"accuracy", optional_json(k.accuracy)},
                             {"precision", optional_json(k.precision)},
                             {"recall", optional_json(k.recall)},
                             {"f1", optional_json(k.f1)}});
    }
    Json summary = {{"youden", cutoff}, {"test_loans", test.size()}, {"confusion", confusion}};
    const auto bt = cfg.out_dir / files::backtest_summary;
    if (fs::exists(bt)) summary["backtest"] = artifacts::read_json(bt);
    artifacts::write_json(cfg.out_dir / files::summary, summary);

    DelimitedWriter w(cfg.out_dir / files::metrics);
    std::vector<std::string> header{"measure"};
    for (const auto& [c, k] : metrics) header.push_back("cutoff_" + std::to_string(c));
    w.header(header);
    const auto row = [&](std::string_view label, auto get) {
        w.field(label);
        for (const auto& [c, k] : metrics) {
            const std::optional<double> v = get(k);
            if (v)
                w.field(*v);
            else
                w.field("");
        }
        w.end_row();
    };
    row("accuracy", [](const ClassificationMetrics& k) { return k.accuracy; });
    row("precision", [](const ClassificationMetrics& k) { return k.precision; });
    row("recall", [](const ClassificationMetrics& k) { return k.recall; });
    row("f1", [](const ClassificationMetrics& k) { return k.f1; });
    w.close();
    return {{"test_loans", test.size()}, {"cutoffs", cutoffs.size()}};
}

using StageFn = Stats (*)(const PipelineConfig&);

const std::vector<std::pair<std::string, StageFn>>& stage_table() {
    static const std::vector<std::pair<std::string, StageFn>> table{
        {"synth", stage_synth},       {"ingest", stage_ingest},     {"counts", stage_counts}, {"split", stage_split},
        {"sample", stage_sample},     {"features", stage_features}, {"fit", stage_fit},       {"backtest", stage_backtest},
        {"score", stage_score},       {"cutoff", stage_cutoff},     {"report", stage_report},
    };
    return table;
}

void run_one(const std::string& name, StageFn fn, const PipelineConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    const auto stats = fn(cfg);
    const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    record(cfg, name, stats, ms);
}

}  // namespace

const std::vector<std::string>& stage_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& [name, fn] : stage_table()) n.push_back(name);
        n.push_back("all");
        return n;
    }();
    return names;
}

void run_stage(std::string_view name, const PipelineConfig& config) {
    config.validate();
    fs::create_directories(config.out_dir);
    if (name == "all") {
        for (const auto& [stage, fn] : stage_table()) {
            if (stage == "synth" && !config.synth) continue;
            run_one(stage, fn, config);
        }
        return;
    }
    for (const auto& [stage, fn] : stage_table()) {
        if (stage == name) {
            run_one(stage, fn, config);
            return;
        }
    }
    throw StageError("unknown stage '" + std::string(name) + "'");
}

}  // namespace hazscore
