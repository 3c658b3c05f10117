// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hazscore/artifacts.hpp"
#include "hazscore/config.hpp"
#include "hazscore/delimited.hpp"
#include "hazscore/features.hpp"
#include "hazscore/hazard_model.hpp"
#include "hazscore/ingest.hpp"
#include "hazscore/panel.hpp"
#include "hazscore/pipeline.hpp"
#include "hazscore/scorecard_eval.hpp"
#include "hazscore/synthgen.hpp"

namespace fs = std::filesystem;
using namespace hazscore;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

LoanHistory history_of_length(int n, std::uint64_t seed = 0) {
    LoanHistory h;
    h.origination.loan_id = "L" + std::to_string(n);
    h.origination.orig_month = Month(2019, 1);
    h.first_month = Month(2019, 2);
    std::mt19937_64 rng(seed);
    for (int i = 0; i < n; ++i) h.status.push_back(0);
    if (n > 0 && (rng() & 1U)) h.status.back() = 1;
    return h;
}

// ---------------------------------------------------------------- 1

Outcome criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    for (int n = 0; n <= 100; ++n) {
        const auto h = history_of_length(n, static_cast<std::uint64_t>(n));
        const auto rows = explode_full(h);
        std::int64_t expected = 0;
        for (int s = 0; s < n; ++s) expected += n - s;  // one sub-panel per snapshot
        std::set<std::pair<int, int>> keys;
        for (const auto& r : rows) keys.insert({r.snapshot_month.index(), r.loan_age});
        if (static_cast<std::int64_t>(rows.size()) != expected || expected != std::int64_t{n} * (n + 1) / 2 ||
            keys.size() != rows.size())
            return {false, fmt("n=%d: %zu rows, expected %lld", n, rows.size(), static_cast<long long>(expected))};
    }
    const auto five = explode_full(history_of_length(5)).size();
    const double secs = seconds_since(t0);
    return {five == 15 && secs < 1.0, fmt("n=0..100 match n(n+1)/2; n=5 -> %zu; %.3fs (limit 1s)", five, secs)};
}

// ---------------------------------------------------------------- 2

Outcome criterion_2() {
    struct Listed {
        int status;
        std::int64_t lo, hi;
        double p;
    };
    // Probabilities exactly as printed in the published selection algorithm.
    const std::vector<Listed> listed{
        {1, 1, 500, 1.0},
        {1, 501, 1000, 0.95},
        {1, 1001, 2000, 0.90},
        {1, 2001, 3000, 0.85},
        {1, 3001, 4000, 0.80},
        {1, 4001, 5000, 0.75},
        {1, 5001, 6000, 0.70},
        {1, 6001, -1, 0.65},
        {0, 1, 100000, 0.1},
        {0, 100001, 200000, 0.1},
        {0, 200001, 300000, 0.05},
        {0, 300001, 400000, 0.033333333},
        {0, 400001, 500000, 0.025},
        {0, 500001, 600000, 0.02},
        {0, 600001, 700000, 0.016666667},
        {0, 700001, 800000, 0.014285714},
        {0, 800001, 900000, 0.0125},
        {0, 900001, -1, 0.011111111},
    };
    const auto table = SamplingRateTable::defaults();
    int checked = 0;
    for (const auto& t : listed) {
        const std::int64_t hi = t.hi < 0 ? t.lo * 10 : t.hi;
        for (std::int64_t c : {t.lo, (t.lo + hi) / 2, hi}) {
            const double p = rate_for(t.status, c, table);
            if (p != t.p || 1.0 / p != 1.0 / t.p)
                return {false, fmt("status %d count %lld: p=%.17g expected %.17g", t.status, static_cast<long long>(c), p, t.p)};
            ++checked;
        }
    }
    const bool examples = 1.0 / rate_for(1, 700, table) == 1.0 / 0.95 &&
                          1.0 / rate_for(0, 950000, table) == 1.0 / 0.011111111;
    const bool tier_count = table.bad_tiers.size() + table.good_tiers.size() == listed.size();
    return {examples && tier_count,
            fmt("18 tiers, %d counts (lo/mid/hi) bit-exact; bad/700 -> w=%.17g, good/950000 -> w=%.17g", checked,
                1.0 / rate_for(1, 700, table), 1.0 / rate_for(0, 950000, table))};
}

// ---------------------------------------------------------------- 3

std::vector<LoanHistory> synthetic_histories(std::int64_t n_loans, std::uint64_t seed) {
    auto spec = GeneratorSpec::standard();
    spec.n_loans = n_loans;
    spec.seed = seed;
    const auto portfolio = generate(spec);
    return validate_and_label(portfolio.loans, portfolio.performance, {spec.horizon, spec.bad_threshold, 0}).histories;
}

Outcome criterion_3() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto histories = synthetic_histories(10000, 7);
    const auto counts = monthly_counts(histories);
    const auto table = SamplingRateTable::defaults();

    // Keep-probability per (month, status) from the counts, independent of the sampler.
    const Month first = counts.begin()->first;
    const int span_months = counts.rbegin()->first - first + 1;
    std::vector<double> p_of(static_cast<std::size_t>(span_months) * 2, 0.0);
    for (const auto& [m, c] : counts)
        for (int s : {0, 1})
            if (c.of(s) > 0) p_of[static_cast<std::size_t>((m - first) * 2 + s)] = rate_for(s, c.of(s), table);

    long double exact = 0.0L, variance = 0.0L;
    for (const auto& h : histories) {
        exact += static_cast<long double>(exploded_size(static_cast<std::int64_t>(h.size())));
        for (std::size_t i = 0; i < h.size(); ++i) {
            const double p = p_of[static_cast<std::size_t>((h.month_at(i) - first) * 2 + h.status[i])];
            variance += static_cast<long double>(i + 1) * (1.0L - p) / p;
        }
    }

    constexpr int seeds = 200;
    long double sum = 0.0L;
    std::int64_t rows = 0, bad_products = 0, bad_weights = 0;
    const double ulp = std::ldexp(1.0, -52);
    for (int s = 0; s < seeds; ++s) {
        double total = 0.0;
        backward_weighted_sample(
            histories, counts, table, 1000 + static_cast<std::uint64_t>(s),
            [&](const PanelRow& r) {
                const double p = p_of[static_cast<std::size_t>((r.calendar_month - first) * 2 + r.status)];
                if (r.weight != 1.0 / p) ++bad_weights;
                if (std::fabs(p * r.weight - 1.0) > ulp) ++bad_products;
                total += r.weight;
                ++rows;
            });
        sum += total;
    }
    const long double mean = sum / seeds;
    const long double se = std::sqrt(variance / seeds);
    const double z = static_cast<double>((mean - exact) / se);
    const double secs = seconds_since(t0);
    const bool pass = std::fabs(z) <= 3.0 && bad_weights == 0 && bad_products == 0 && secs < 120.0;
    return {pass, fmt("loans=%zu full panel=%.0Lf mean weight=%.1Lf z=%.2f; %lld rows with w==1/p bit-exact and "
                      "|p*w-1|<=2^-52 (violations %lld/%lld); %.1fs (limit 120s)",
                      histories.size(), exact, mean, z, static_cast<long long>(rows),
                      static_cast<long long>(bad_weights), static_cast<long long>(bad_products), secs)};
}

// ---------------------------------------------------------------- 4

Outcome criterion_4() {
    const std::vector<std::vector<double>> rates{
        {0.003053297, 0.001655999, 0.001167344, 0.000839983, 0.000449718},
        {0.002962558, 0.001712162, 0.001132001, 0.000781153, 0.000485051},
        {0.003155422, 0.001721501, 0.001273959, 0.00079133, 0.000481101},
        {0.003203308, 0.001900315, 0.001371953, 0.000827489, 0.000428583},
    };
    const std::vector<double> slopes{0.000650895, 0.000619377, 0.00066858, 0.000693681};
    const double average = 0.000658133;
    const std::vector<double> multipliers{1.011120904, 1.062573458, 0.98437428, 0.948754518};

    const auto spec = interaction_from_bad_rates(rates, {160000, 238000, 350000});
    double slope_err = std::fabs(spec.average_slope - average), mult_err = 0.0;
    for (std::size_t g = 0; g < 4; ++g) {
        slope_err = std::max(slope_err, std::fabs(spec.slopes[g] - slopes[g]));
        mult_err = std::max(mult_err, std::fabs(spec.band_multipliers[g] - multipliers[g]));
    }
    return {slope_err <= 1e-8 && mult_err <= 1e-8,
            fmt("max slope/average error %.2e (tol 1e-8); max multiplier error %.2e (tol 1e-8); "
                "multipliers %.9f %.9f %.9f %.9f",
                slope_err, mult_err, spec.band_multipliers[0], spec.band_multipliers[1], spec.band_multipliers[2],
                spec.band_multipliers[3])};
}

// ---------------------------------------------------------------- 5

Outcome criterion_5() {
    const auto m = classification_metrics({58881, 7490, 1167, 601});
    const double expected[] = {0.87295088, 0.074280064, 0.339932127, 0.121919059};
    const std::optional<double> got[] = {m.accuracy, m.precision, m.recall, m.f1};
    double err = 0.0;
    for (int k = 0; k < 4; ++k) {
        if (!got[k]) return {false, "undefined metric"};
        err = std::max(err, std::fabs(*got[k] - expected[k]));
    }
    return {err <= 1e-6, fmt("accuracy %.8f precision %.9f recall %.9f f1 %.9f; max error %.2e (tol 1e-6)",
                             *m.accuracy, *m.precision, *m.recall, *m.f1, err)};
}

// ---------------------------------------------------------------- 6, 7, 9

std::vector<CoefficientTable> all_fits;  // every fit, for the Wald check

long double oracle_log_likelihood(const DesignMatrix& d, const std::vector<long double>& beta) {
    long double ll = 0.0L;
    for (std::size_t i = 0; i < d.rows(); ++i) {
        const auto x = d.row(i);
        long double eta = beta[0];
        for (std::size_t j = 0; j < x.size(); ++j) eta += beta[j + 1] * x[j];
        const long double log1pexp = eta > 0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
        ll += d.weight(i) * (d.status(i) * eta - log1pexp);
    }
    return ll;
}

std::vector<double> finite_difference_gradient(const DesignMatrix& d, const std::vector<double>& beta) {
    std::vector<double> g(beta.size());
    for (std::size_t j = 0; j < beta.size(); ++j) {
        std::vector<long double> up(beta.begin(), beta.end()), down(beta.begin(), beta.end());
        const long double h = 1e-5L;
        up[j] += h;
        down[j] -= h;
        g[j] = static_cast<double>((oracle_log_likelihood(d, up) - oracle_log_likelihood(d, down)) / (2 * h));
    }
    return g;
}

DesignMatrix simulated_design(std::size_t n, const std::vector<double>& beta, std::uint64_t seed) {
    const std::size_t k = beta.size() - 1;
    std::vector<std::string> names;
    for (std::size_t j = 0; j < k; ++j) names.push_back("x" + std::to_string(j + 1));
    DesignMatrix d(names);
    d.reserve(n);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> u;
    std::vector<double> x(k);
    for (std::size_t i = 0; i < n; ++i) {
        const double common = z(rng);
        for (std::size_t j = 0; j < k; ++j) x[j] = 0.5 * common + z(rng);
        x[k - 1] = u(rng) < 0.3 ? 1.0 : 0.0;
        double eta = beta[0];
        for (std::size_t j = 0; j < k; ++j) eta += beta[j + 1] * x[j];
        d.add_row(x, u(rng) < 1.0 / (1.0 + std::exp(-eta)) ? 1 : 0, 1.0);
    }
    return d;
}

Outcome criterion_6() {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<double> truth{-1.5, 0.4, -0.3, 0.25, -0.2, 0.15, 0.1, -0.05, 0.3, -0.35, 0.5, -0.6};
    int covered = 0;
    double worst_grad_opt = 0.0, worst_grad_rel = 0.0;
    std::string misses;
    for (int s = 0; s < 20; ++s) {
        const auto d = simulated_design(100000, truth, 500 + static_cast<std::uint64_t>(s));
        const auto table = fit(d);
        all_fits.push_back(table);
        bool ok = true;
        for (std::size_t j = 0; j < truth.size(); ++j) {
            const auto& c = table.coefficients[j];
            if (std::fabs(c.estimate - truth[j]) > 3.0 * c.standard_error) ok = false;
        }
        covered += ok ? 1 : 0;
        if (!ok) misses += " " + std::to_string(s);

        // At the optimum, and at a point away from it where the gradient is large.
        const auto beta = table.estimates();
        const auto fd_opt = finite_difference_gradient(d, beta);
        const auto an_opt = evaluate_likelihood(d, beta).gradient;
        auto moved = beta;
        for (double& b : moved) b += 0.05;
        const auto fd_mov = finite_difference_gradient(d, moved);
        const auto an_mov = evaluate_likelihood(d, moved).gradient;
        for (std::size_t j = 0; j < beta.size(); ++j) {
            worst_grad_opt = std::max(worst_grad_opt, std::fabs(an_opt[j] - fd_opt[j]) / std::max(1.0, std::fabs(fd_opt[j])));
            worst_grad_rel = std::max(worst_grad_rel, std::fabs(an_mov[j] - fd_mov[j]) / std::fabs(fd_mov[j]));
        }
    }
    const double secs = seconds_since(t0);
    return {covered >= 18 && worst_grad_opt <= 1e-5 && worst_grad_rel <= 1e-5 && secs < 300.0,
            fmt("dim=%zu n=1e5: %d/20 seeds with all |b-b0|<=3se (need 18)%s; gradient vs finite difference: "
                "%.2e at optimum, %.2e relative off-optimum (tol 1e-5); %.1fs (limit 300s)",
                truth.size(), covered, misses.empty() ? "" : (", misses:" + misses).c_str(), worst_grad_opt,
                worst_grad_rel, secs)};
}

Outcome criterion_7() {
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 5; ++s) {
        const std::vector<double> truth{-1.0, 0.5, -0.4, 0.3, 0.2, -0.1};
        const auto base = simulated_design(3000, truth, 900 + s);
        std::mt19937_64 rng(77 + s);
        std::uniform_int_distribution<int> kdist(1, 4);
        DesignMatrix weighted(base.names()), duplicated(base.names());
        for (std::size_t i = 0; i < base.rows(); ++i) {
            const int k = kdist(rng);
            weighted.add_row(base.row(i), base.status(i), k);
            for (int r = 0; r < k; ++r) duplicated.add_row(base.row(i), base.status(i), 1.0);
        }
        const auto a = fit(weighted);
        const auto b = fit(duplicated);
        all_fits.push_back(a);
        all_fits.push_back(b);
        for (std::size_t j = 0; j < truth.size(); ++j)
            worst = std::max(worst, std::fabs(a.coefficients[j].estimate - b.coefficients[j].estimate));
    }
    return {worst <= 1e-6, fmt("5 datasets, weights 1..4 vs duplicated rows: max coefficient difference %.2e (tol 1e-6)", worst)};
}

// ---------------------------------------------------------------- 8

Outcome criterion_8() {
    std::mt19937_64 rng(4242);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = std::uniform_int_distribution<int>(2, 500)(rng);
        std::vector<int> labels(static_cast<std::size_t>(n));
        std::vector<double> weights(labels.size()), preds(labels.size());
        const int grid = std::uniform_int_distribution<int>(3, 60)(rng);
        for (std::size_t i = 0; i < labels.size(); ++i) {
            labels[i] = static_cast<int>(rng() % 3 == 0);
            weights[i] = static_cast<double>(1 + rng() % 5);
            preds[i] = static_cast<double>(rng() % static_cast<std::uint64_t>(grid)) / grid;
        }
        labels[0] = 1;
        labels[1] = 0;

        std::int64_t pos = 0, neg = 0;
        for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] ? pos : neg) += static_cast<std::int64_t>(weights[i]);
        std::set<double, std::greater<>> thresholds(preds.begin(), preds.end());
        std::vector<RocPoint> expected{{std::numeric_limits<double>::infinity(), 0.0, 0.0}};
        std::vector<std::int64_t> youden_numerator;  // (tpr - fpr) * pos * neg, exact
        for (double t : thresholds) {
            std::int64_t tp = 0, fp = 0;
            for (std::size_t i = 0; i < labels.size(); ++i)
                if (preds[i] >= t) (labels[i] ? tp : fp) += static_cast<std::int64_t>(weights[i]);
            expected.push_back({t, static_cast<double>(tp) / static_cast<double>(pos),
                                static_cast<double>(fp) / static_cast<double>(neg)});
            youden_numerator.push_back(tp * neg - fp * pos);
        }
        std::int64_t pairs = 0;  // twice the Mann-Whitney statistic
        for (std::size_t i = 0; i < labels.size(); ++i)
            for (std::size_t j = 0; j < labels.size(); ++j)
                if (labels[i] == 1 && labels[j] == 0)
                    pairs += static_cast<std::int64_t>(weights[i] * weights[j]) *
                             (preds[i] > preds[j] ? 2 : preds[i] == preds[j] ? 1 : 0);
        const double expected_auc = static_cast<double>(pairs) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));

        std::size_t best_k = 0;
        for (std::size_t k = 1; k < youden_numerator.size(); ++k)
            if (youden_numerator[k] > youden_numerator[best_k]) best_k = k;  // ties keep the higher threshold
        const RocPoint* best = &expected[best_k + 1];

        const auto curve = roc(labels, weights, preds);
        const auto cut = youden_cutoff(curve);
        if (curve.points != expected) return {false, fmt("trial %d: ROC points differ", trial)};
        if (curve.auc != expected_auc)
            return {false, fmt("trial %d: AUC %.17g vs brute force %.17g", trial, curve.auc, expected_auc)};
        if (cut.threshold != best->threshold || cut.j != best->tpr - best->fpr || cut.tpr != best->tpr ||
            cut.fpr != best->fpr)
            return {false, fmt("trial %d: Youden %.6g vs brute force %.6g", trial, cut.threshold, best->threshold)};
    }
    return {true, "50 datasets (n<=500, tied predictions, integer weights): points, AUC and Youden bit-identical"};
}

// ---------------------------------------------------------------- 10, 12

struct PipelineRun {
    fs::path root;
    bool ok = false;
    std::string error;
};

PipelineRun run_pipeline(const fs::path& root, unsigned threads) {
    PipelineRun run;
    run.root = root;
    fs::remove_all(root);
    fs::create_directories(root);
    Json doc = {
        {"paths",
         {{"loans", "data/loans.txt"}, {"performance", "data/performance.txt"}, {"macro_dir", "data/macro"}, {"out_dir", "out"}}},
        {"macro_series",
         Json::array({{{"name", "MORTGAGE30US"}, {"frequency", "monthly"}},
                      {{"name", "UNRATENSA"}, {"frequency", "monthly"}},
                      {{"name", "RCMFLBACTDPDPCT90P"}, {"frequency", "quarterly"}}})},
        {"seed", 31337},
        {"threads", threads},
        {"synth", {{"n_loans", 4000}}},
    };
    try {
        run_stage("all", config_from_json(doc, root));
        run.ok = true;
    } catch (const std::exception& e) {
        run.error = e.what();
    }
    return run;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::map<std::string, std::string> tree_contents(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (!e.is_regular_file()) continue;
        const auto rel = fs::relative(e.path(), root).generic_string();
        if (e.path().filename() == "manifest.json") {
            auto doc = Json::parse(slurp(e.path()));
            doc.erase("timings_ms");
            out[rel] = doc.dump();
        } else {
            out[rel] = slurp(e.path());
        }
    }
    return out;
}

Outcome criterion_10(const PipelineRun& run) {
    if (!run.ok) return {false, "pipeline failed: " + run.error};
    LineReader reader(run.root / "out" / files::band_table);
    std::string line;
    reader.next(line);
    std::vector<std::pair<std::string, double>> occupied;
    while (reader.next(line)) {
        const auto f = split_fields(line, ',');
        if (parse_double(f[4]).value_or(0.0) > 0.0)
            occupied.emplace_back(std::string(f[0]) + "-" + std::string(f[1]), parse_double(f[5]).value_or(0.0));
    }
    for (std::size_t k = 1; k < occupied.size(); ++k)
        if (!(occupied[k].second < occupied[k - 1].second))
            return {false, "band " + occupied[k].first + " does not decrease"};
    std::string bands;
    for (const auto& [name, h] : occupied) bands += fmt(" %s:%.5f", name.c_str(), h);
    return {occupied.size() >= 3, fmt("%zu occupied bands, mean predicted hazard strictly decreasing:", occupied.size()) + bands};
}

Outcome criterion_12(const PipelineRun& a, const PipelineRun& b, const PipelineRun& c) {
    for (const auto* r : {&a, &b, &c})
        if (!r->ok) return {false, "pipeline failed: " + r->error};
    const auto ta = tree_contents(a.root), tb = tree_contents(b.root), tc = tree_contents(c.root);
    const auto diff = [](const auto& x, const auto& y) -> std::string {
        if (x.size() != y.size()) return "file sets differ";
        for (const auto& [name, body] : x) {
            const auto it = y.find(name);
            if (it == y.end()) return "missing " + name;
            if (it->second != body) return "differs: " + name;
        }
        return {};
    };
    const auto d_threads = diff(ta, tb);
    const auto d_rerun = diff(ta, tc);
    if (!d_threads.empty()) return {false, "1 vs 8 threads: " + d_threads};
    if (!d_rerun.empty()) return {false, "rerun: " + d_rerun};
    std::size_t bytes = 0;
    for (const auto& [name, body] : ta) bytes += body.size();
    return {true, fmt("%zu artifacts (%zu bytes) byte-identical across two runs and 1 vs 8 threads "
                      "(manifest compared without timings)",
                      ta.size(), bytes)};
}

// ---------------------------------------------------------------- 9

Outcome criterion_9(const PipelineRun& run) {
    if (run.ok) all_fits.push_back(artifacts::model_from_json(artifacts::read_json(run.root / "out" / files::model)));
    double worst = 0.0;
    std::size_t coefficients = 0;
    for (const auto& t : all_fits)
        for (const auto& c : t.coefficients) {
            const double ratio = c.estimate / c.standard_error;
            worst = std::max(worst, std::fabs(c.wald_chi_square - ratio * ratio) / std::max(1.0, ratio * ratio));
            ++coefficients;
        }
    const auto fico = make_coefficient("FICO", -0.00808, 0.000051);
    const double rel = std::fabs(fico.wald_chi_square - 25053.3766) / 25053.3766;
    return {run.ok && worst <= 1e-9 && rel <= 0.005,
            fmt("%zu fits / %zu coefficients: max |wald-(est/se)^2| relative %.2e (tol 1e-9); "
                "FICO row (-0.00808, 0.000051) -> %.1f vs 25053.3766, %.3f%% (tol 0.5%%)",
                all_fits.size(), coefficients, worst, fico.wald_chi_square, rel * 100.0)};
}

}  // namespace

int main() {
    int failures = 0;
    std::map<int, bool> passed;
    const auto report = [&](int id, const char* title, const std::function<Outcome()>& body) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = body();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        passed[id] = o.pass;
        failures += o.pass ? 0 : 1;
        std::printf("criterion %2d %s  %s [%.2fs]: %s\n", id, o.pass ? "PASS" : "FAIL", title, seconds_since(t0),
                    o.detail.c_str());
        std::fflush(stdout);
    };

    const fs::path scratch = fs::temp_directory_path() / ("hazscore_acceptance_" + std::to_string(::getpid()));
    PipelineRun a, b, c;

    report(1, "exploded-size identity", criterion_1);
    report(2, "sampling tier reproduction", criterion_2);
    report(3, "Horvitz-Thompson unbiasedness", criterion_3);
    report(4, "interaction table reproduction", criterion_4);
    report(5, "classification metric reproduction", criterion_5);
    report(6, "fit oracle", criterion_6);
    report(7, "weight equivalence", criterion_7);
    report(8, "ROC/Youden oracle", criterion_8);
    a = run_pipeline(scratch / "run1_t1", 1);
    b = run_pipeline(scratch / "run2_t8", 8);
    c = run_pipeline(scratch / "run3_t1", 1);
    report(9, "Wald consistency", [&] { return criterion_9(a); });
    report(10, "score-band rank ordering", [&] { return criterion_10(a); });
    report(11, "desk-scale substitution", [&] {
        const bool ok = passed[3] && passed[6] && passed[10];
        return Outcome{ok, "full-dataset results are not targeted; substitute property suites 3, 6 and 10 " +
                               std::string(ok ? "passed" : "did not all pass")};
    });
    report(12, "end-to-end determinism", [&] { return criterion_12(a, b, c); });

    std::error_code ec;
    fs::remove_all(scratch, ec);
    std::printf("%d of 12 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
