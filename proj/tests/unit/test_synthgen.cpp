#include <cmath>
#include <map>

#include "doctest.h"
#include "hazscore/hazard_model.hpp"
#include "hazscore/ingest.hpp"
#include "hazscore/scorecard_eval.hpp"
#include "hazscore/synthgen.hpp"
#include "helpers.hpp"

using namespace hazscore;

TEST_CASE("truncated normal stays in bounds") {
    TruncatedNormal t{0.0, 1.0, -0.5, 2.0};
    std::mt19937_64 rng(3);
    double sum = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double x = t.draw(rng);
        CHECK(x >= -0.5);
        CHECK(x <= 2.0);
        sum += x;
    }
    CHECK(sum / 10000 > 0.2);
}

TEST_CASE("standard spec validates and aligns coefficients") {
    const auto spec = GeneratorSpec::standard();
    CHECK_NOTHROW(spec.validate());
    const auto beta = spec.beta();
    CHECK(beta.size() == spec.features.names().size() + 1);
    CHECK(beta[0] == spec.intercept);
    auto bad = spec;
    bad.coefficients["no_such_regressor"] = 1.0;
    CHECK_THROWS(bad.beta());
    auto hot = spec;
    hot.intercept = 5.0;
    CHECK_THROWS(hot.validate());
}

TEST_CASE("near-zero hazard gives clean censored histories") {
    auto spec = GeneratorSpec::standard();
    spec.n_loans = 200;
    spec.coefficients.clear();
    spec.intercept = -40.0;
    const auto p = generate(spec);
    const auto hs = validate_and_label(p.loans, p.performance).histories;
    CHECK(hs.size() == 200);
    for (const auto& h : hs) {
        CHECK_FALSE(h.terminal_bad());
        CHECK(h.size() == 36);
    }
}

TEST_CASE("intercept-only hazard matches the geometric survival law") {
    auto spec = GeneratorSpec::standard();
    spec.n_loans = 4000;
    spec.coefficients.clear();
    const double h = 0.004;
    spec.intercept = std::log(h / (1 - h));
    const auto p = generate(spec);
    const auto hs = validate_and_label(p.loans, p.performance).histories;
    double bads = 0;
    for (const auto& x : hs) bads += x.terminal_bad() ? 1 : 0;
    const double expected = 1 - std::pow(1 - h, 36);
    const double sd = std::sqrt(expected * (1 - expected) / hs.size());
    CHECK(std::fabs(bads / hs.size() - expected) < 3 * sd);
}

TEST_CASE("true hazard equals predict_hazard on assembled features") {
    auto spec = GeneratorSpec::standard();
    spec.n_loans = 10;
    const auto macros = generate_macros(spec);
    const auto beta = spec.beta();
    for (int i = 0; i < 10; ++i) {
        const auto loan = generate_loan(spec, macros, i);
        for (int age = 0; age < 36; age += 7) {
            PanelRow row;
            row.loan_id = loan.loan_id;
            row.snapshot_month = loan.orig_month + spec.performance_lag;
            row.calendar_month = row.snapshot_month + age;
            row.loan_age = age;
            const auto a = assemble(row, loan, macros, spec.features);
            REQUIRE(a.ok());
            CHECK(true_hazard(spec, macros, loan, row.calendar_month) == doctest::Approx(predict_hazard(a.features.values, beta)).epsilon(1e-14));
        }
    }
    CHECK(predict_hazard(std::vector<double>(3, 0.0), std::vector<double>(4, 0.0)) == 0.5);
}

TEST_CASE("loans depend only on seed and index") {
    auto spec = GeneratorSpec::standard();
    const auto macros = generate_macros(spec);
    const auto a = generate_loan(spec, macros, 17);
    spec.n_loans = 5;
    CHECK(generate_loan(spec, macros, 17) == a);
    spec.seed += 1;
    CHECK_FALSE(generate_loan(spec, macros, 17) == a);
    CHECK(std::fmod(a.orig_int_rt, 0.125) == doctest::Approx(0.0));
}

TEST_CASE("writing the same portfolio twice is byte-identical") {
    auto spec = GeneratorSpec::standard();
    spec.n_loans = 300;
    test::TempDir d1, d2;
    write_portfolio(generate(spec), {d1 / "l.txt", d1 / "p.txt", d1 / "macro"});
    write_portfolio(generate(spec), {d2 / "l.txt", d2 / "p.txt", d2 / "macro"});
    CHECK(test::read_file(d1 / "l.txt") == test::read_file(d2 / "l.txt"));
    CHECK(test::read_file(d1 / "p.txt") == test::read_file(d2 / "p.txt"));
    CHECK(test::read_file(d1.path() / "macro" / "UNRATENSA.csv") == test::read_file(d2.path() / "macro" / "UNRATENSA.csv"));
    const auto parsed = parse_loans(d1 / "l.txt");
    CHECK(parsed.rows.size() == 300);
    CHECK(parsed.rejections.empty());
}

TEST_CASE("fitted hazards track the true hazards") {
    auto spec = GeneratorSpec::standard();
    spec.n_loans = 6000;
    spec.seed = 99;
    spec.coefficients = {{"fico", -0.01}, {"dti", 0.03}, {"UNRATENSA_lag_1month", 0.15}};
    spec.intercept = 0.5;
    const auto p = generate(spec);
    const auto hs = validate_and_label(p.loans, p.performance).histories;
    FeatureSpec fs = spec.features;
    fs.loan_age.knots.clear();
    fs.snapshot_mob.knots.clear();
    // Every row here sits in the first snapshot, so snapshot_mob is constant and dropped.
    auto names = fs.names();
    REQUIRE(names[1] == "snapshot_mob");
    names.erase(names.begin() + 1);
    DesignMatrix d(names);
    std::vector<double> truth, x;
    for (const auto& h : hs) {
        for (std::size_t i = 0; i < h.size(); ++i) {
            PanelRow row;
            row.loan_id = h.origination.loan_id;
            row.snapshot_month = h.first_month;
            row.calendar_month = h.month_at(i);
            row.loan_age = static_cast<int>(i);
            const auto a = assemble(row, h.origination, p.macros, fs);
            x = a.features.values;
            x.erase(x.begin() + 1);
            d.add_row(x, h.status[i], 1.0);
            truth.push_back(true_hazard(spec, p.macros, h.origination, row.calendar_month));
        }
    }
    REQUIRE(d.rows() > 100000);
    const auto t = fit(d);
    auto beta = t.estimates();
    double gap = 0.0;
    for (std::size_t i = 0; i < d.rows(); ++i) gap += std::fabs(predict_hazard(d.row(i), beta) - truth[i]);
    CHECK(gap / d.rows() <= 5e-4);
}

TEST_CASE("backtest with true hazards stays within Monte Carlo error") {
    auto spec = GeneratorSpec::standard();
    spec.n_loans = 5000;
    spec.seed = 123;
    const auto p = generate(spec);
    const auto hs = validate_and_label(p.loans, p.performance).histories;
    std::vector<BacktestRow> rows;
    std::map<Month, double> variance;
    for (const auto& h : hs)
        for (std::size_t i = 0; i < h.size(); ++i) {
            const double hz = true_hazard(spec, p.macros, h.origination, h.month_at(i));
            rows.push_back({h.month_at(i), h.status[i], 1.0, hz});
            variance[h.month_at(i)] += hz * (1 - hz);
        }
    const auto report = backtest(rows);
    int inside = 0;
    for (const auto& m : report.months) {
        const double sigma = std::sqrt(variance[m.month]) / m.weight;
        inside += std::fabs(m.actual - m.predicted) <= 3 * sigma + 1e-12 ? 1 : 0;
    }
    CHECK(inside >= 0.95 * static_cast<double>(report.months.size()));
}
