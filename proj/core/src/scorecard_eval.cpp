#include "hazscore/scorecard_eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "hazscore/numeric.hpp"

namespace hazscore {

BacktestReport backtest(std::span<const BacktestRow> rows) {
    struct Acc {
        std::int64_t rows = 0;
        CompensatedSum w, wy, wh;
    };
    std::map<Month, Acc> by_month;
    for (const auto& r : rows) {
        auto& a = by_month[r.month];
        ++a.rows;
        a.w.add(r.weight);
        if (r.status == 1) a.wy.add(r.weight);
        a.wh.add(r.weight * r.hazard);
    }
    if (by_month.empty()) throw std::invalid_argument("backtest needs at least one month");

    BacktestReport report;
    double abs_sum = 0.0, sq_sum = 0.0, pct_sum = 0.0;
    std::int64_t pct_n = 0;
    for (const auto& [month, a] : by_month) {
        MonthBacktest m;
        m.month = month;
        m.rows = a.rows;
        m.weight = a.w.value();
        m.actual = a.wy.value() / m.weight;
        m.predicted = a.wh.value() / m.weight;
        const double err = std::fabs(m.actual - m.predicted);
        abs_sum += err;
        sq_sum += err * err;
        if (m.actual > 0.0) {
            pct_sum += err / m.actual;
            ++pct_n;
        } else {
            ++report.mape_excluded_months;
        }
        report.months.push_back(m);
    }
    const auto k = static_cast<double>(report.months.size());
    report.mae = abs_sum / k;
    report.rmse = std::sqrt(sq_sum / k);
    if (pct_n > 0) report.mape = pct_sum / static_cast<double>(pct_n);
    return report;
}

RocCurve roc(std::span<const int> labels, std::span<const double> weights, std::span<const double> predictions) {
    const std::size_t n = labels.size();
    if (weights.size() != n || predictions.size() != n) throw std::invalid_argument("roc inputs differ in length");
    double pos = 0.0, neg = 0.0;
    for (std::size_t i = 0; i < n; ++i) (labels[i] == 1 ? pos : neg) += weights[i];
    if (!(pos > 0.0) || !(neg > 0.0)) throw std::invalid_argument("roc needs both classes with positive weight");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return predictions[a] > predictions[b]; });

    RocCurve curve;
    curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
    // Trapezoids are summed in weight units and divided once at the end.
    double tp = 0.0, fp = 0.0, area = 0.0;
    for (std::size_t i = 0; i < n;) {
        const double t = predictions[order[i]];
        const double tp0 = tp, fp0 = fp;
        while (i < n && predictions[order[i]] == t) {
            (labels[order[i]] == 1 ? tp : fp) += weights[order[i]];
            ++i;
        }
        area += (fp - fp0) * (tp + tp0);
        curve.points.push_back({t, tp / pos, fp / neg});
    }
    curve.auc = area / (2.0 * pos * neg);
    return curve;
}

YoudenCutoff youden_cutoff(const RocCurve& curve) {
    YoudenCutoff best;
    bool found = false;
    // Points are in descending threshold order, so a strict improvement test
    // keeps the higher threshold on ties. Differences within rounding of the
    // rate divisions count as ties.
    constexpr double tie = 1e-12;
    for (const auto& p : curve.points) {
        if (!std::isfinite(p.threshold)) continue;
        const double j = p.tpr - p.fpr;
        if (!found || j > best.j + tie) {
            best = {p.threshold, j, p.tpr, p.fpr};
            found = true;
        }
    }
    if (!found) throw std::invalid_argument("roc curve has no finite thresholds");
    return best;
}

ScoreScale ScoreScale::range_calibrated(double logodds_lo, double logodds_hi) {
    ScoreScale s;
    s.mode = ScoreMode::range_calibrated;
    s.logodds_lo = logodds_lo;
    s.logodds_hi = logodds_hi;
    s.validate();
    return s;
}

ScoreScale ScoreScale::anchor_based(double anchor_score, double anchor_odds, double points_to_double_odds) {
    ScoreScale s;
    s.mode = ScoreMode::anchor_based;
    s.anchor_score = anchor_score;
    s.anchor_odds = anchor_odds;
    s.points_to_double_odds = points_to_double_odds;
    s.validate();
    return s;
}

void ScoreScale::validate() const {
    if (!(max_score > min_score)) throw std::invalid_argument("score range is empty");
    if (mode == ScoreMode::range_calibrated) {
        if (!(logodds_hi > logodds_lo)) throw std::invalid_argument("range-calibrated scale needs logodds_lo < logodds_hi");
    } else {
        if (!(anchor_odds > 0.0)) throw std::invalid_argument("anchor odds must be positive");
        if (!(points_to_double_odds > 0.0)) throw std::invalid_argument("points to double odds must be positive");
    }
}

double ScoreScale::raw_score(double default_logodds) const {
    if (mode == ScoreMode::range_calibrated)
        return max_score - (default_logodds - logodds_lo) / (logodds_hi - logodds_lo) * (max_score - min_score);
    // good:bad log-odds is the negated default log-odds
    const double factor = points_to_double_odds / std::log(2.0);
    return anchor_score + factor * (-default_logodds - std::log(anchor_odds));
}

double ScoreScale::logodds_at(double score) const {
    if (mode == ScoreMode::range_calibrated)
        return logodds_lo + (max_score - score) / (max_score - min_score) * (logodds_hi - logodds_lo);
    const double factor = points_to_double_odds / std::log(2.0);
    return -((score - anchor_score) / factor + std::log(anchor_odds));
}

int to_score(double hazard, const ScoreScale& scale) {
    if (!(hazard > 0.0 && hazard < 1.0)) throw std::invalid_argument("hazard must lie strictly between 0 and 1");
    const double raw = scale.raw_score(std::log(hazard / (1.0 - hazard)));
    const double clamped = std::clamp(std::round(raw), scale.min_score, scale.max_score);
    return static_cast<int>(clamped);
}

std::vector<ScoreBand> score_band_table(std::span<const ScoredRow> rows, int band_width, int min_score, int max_score) {
    if (band_width < 1) throw std::invalid_argument("band width must be positive");
    std::vector<ScoreBand> bands;
    bands.push_back({min_score, min_score + band_width});
    while (bands.back().hi < max_score) {
        const int lo = bands.back().hi + 1;
        bands.push_back({lo, lo + band_width - 1});
    }
    bands.back().hi = std::max(bands.back().hi, max_score);
    std::vector<CompensatedSum> wh(bands.size());
    for (const auto& r : rows) {
        const auto it = std::find_if(bands.begin(), bands.end(), [&](const ScoreBand& b) { return r.score <= b.hi; });
        if (it == bands.end() || r.score < min_score) throw std::invalid_argument("score outside the band range");
        (r.status == 1 ? it->bads : it->goods) += r.weight;
        it->total += r.weight;
        wh[static_cast<std::size_t>(it - bands.begin())].add(r.weight * r.hazard);
    }
    for (std::size_t k = 0; k < bands.size(); ++k)
        if (bands[k].total > 0.0) bands[k].mean_hazard = wh[k].value() / bands[k].total;
    return bands;
}

ConfusionMatrix confusion_at(std::span<const ScoredRow> rows, int cutoff_score) {
    ConfusionMatrix m;
    for (const auto& r : rows) {
        const bool predicted_bad = r.score < cutoff_score;
        if (r.status == 1)
            (predicted_bad ? m.tp : m.fn) += r.weight;
        else
            (predicted_bad ? m.fp : m.tn) += r.weight;
    }
    return m;
}

ClassificationMetrics classification_metrics(const ConfusionMatrix& m) {
    ClassificationMetrics out;
    if (m.total() > 0.0) out.accuracy = (m.tp + m.tn) / m.total();
    if (m.tp + m.fp > 0.0) out.precision = m.tp / (m.tp + m.fp);
    if (m.tp + m.fn > 0.0) out.recall = m.tp / (m.tp + m.fn);
    if (out.precision && out.recall && *out.precision + *out.recall > 0.0)
        out.f1 = 2.0 * *out.recall * *out.precision / (*out.recall + *out.precision);
    return out;
}

}  // namespace hazscore
