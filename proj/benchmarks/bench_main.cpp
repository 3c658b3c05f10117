#include <benchmark/benchmark.h>

#include <random>

#include "hazscore/hazard_model.hpp"
#include "hazscore/ingest.hpp"
#include "hazscore/panel.hpp"
#include "hazscore/scorecard_eval.hpp"
#include "hazscore/synthgen.hpp"

using namespace hazscore;

namespace {

const std::vector<LoanHistory>& portfolio() {
    static const auto histories = [] {
        auto spec = GeneratorSpec::standard();
        spec.n_loans = 5000;
        const auto p = generate(spec);
        return validate_and_label(p.loans, p.performance).histories;
    }();
    return histories;
}

void BM_ExplodeFull(benchmark::State& state) {
    const auto& hs = portfolio();
    for (auto _ : state) {
        std::int64_t rows = 0;
        for (const auto& h : hs) explode_full(h, [&](const PanelRow&) { ++rows; });
        benchmark::DoNotOptimize(rows);
        state.counters["rows"] = static_cast<double>(rows);
    }
}
BENCHMARK(BM_ExplodeFull)->Unit(benchmark::kMillisecond);

void BM_BackwardSample(benchmark::State& state) {
    const auto& hs = portfolio();
    const auto counts = monthly_counts(hs);
    const auto table = SamplingRateTable::defaults();
    SamplingOptions options;
    options.threads = static_cast<unsigned>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) {
        const auto summary = backward_weighted_sample(hs, counts, table, seed++, [](const PanelRow&) {}, options);
        benchmark::DoNotOptimize(summary.total_weight);
    }
}
BENCHMARK(BM_BackwardSample)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

DesignMatrix random_design(std::size_t n, std::size_t k) {
    std::vector<std::string> names;
    for (std::size_t j = 0; j < k; ++j) names.push_back("x" + std::to_string(j));
    DesignMatrix d(names);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> u;
    std::vector<double> x(k);
    for (std::size_t i = 0; i < n; ++i) {
        double eta = -3.0;
        for (std::size_t j = 0; j < k; ++j) {
            x[j] = z(rng);
            eta += 0.2 * x[j];
        }
        d.add_row(x, u(rng) < 1.0 / (1.0 + std::exp(-eta)) ? 1 : 0, 1.0 + u(rng));
    }
    return d;
}

void BM_Fit(benchmark::State& state) {
    const auto d = random_design(static_cast<std::size_t>(state.range(0)), 18);
    FitOptions options;
    options.threads = static_cast<unsigned>(state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(fit(d, options).log_likelihood);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Fit)->Args({100000, 1})->Args({100000, 4})->Args({1000000, 4})->Unit(benchmark::kMillisecond);

void BM_Roc(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u;
    std::vector<int> y(n);
    std::vector<double> w(n, 1.0), p(n);
    for (std::size_t i = 0; i < n; ++i) {
        p[i] = u(rng);
        y[i] = u(rng) < p[i] * 0.1 ? 1 : 0;
    }
    for (auto _ : state) benchmark::DoNotOptimize(youden_cutoff(roc(y, w, p)).threshold);
}
BENCHMARK(BM_Roc)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
