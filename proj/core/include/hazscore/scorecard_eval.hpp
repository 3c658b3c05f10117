#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hazscore/month.hpp"

namespace hazscore {

struct BacktestRow {
    Month month;
    int status = 0;
    double weight = 1.0;
    double hazard = 0.0;
};

struct MonthBacktest {
    Month month;
    std::int64_t rows = 0;
    double weight = 0.0;
    double actual = 0.0;     // weighted bad rate
    double predicted = 0.0;  // weighted mean hazard
};

struct BacktestReport {
    std::vector<MonthBacktest> months;  // ascending
    double mae = 0.0;
    double rmse = 0.0;
    std::optional<double> mape;  // empty if every month had a zero actual rate
    std::int64_t mape_excluded_months = 0;
};

/// Weighted actual vs predicted bad rate per calendar month with MAE, RMSE
/// and MAPE across months; MAPE skips zero-actual months and counts them.
BacktestReport backtest(std::span<const BacktestRow> rows);

struct RocPoint {
    double threshold = 0.0;  // predicted positive iff prediction >= threshold
    double tpr = 0.0;
    double fpr = 0.0;

    bool operator==(const RocPoint&) const = default;
};

/// Points from (+inf, 0, 0) through every distinct prediction in descending
/// order; the last point is (1, 1).
struct RocCurve {
    std::vector<RocPoint> points;
    double auc = 0.0;
};

RocCurve roc(std::span<const int> labels, std::span<const double> weights, std::span<const double> predictions);

struct YoudenCutoff {
    double threshold = 0.0;
    double j = 0.0;
    double tpr = 0.0;
    double fpr = 0.0;
};

/// argmax of TPR - FPR over finite thresholds; ties (within 1e-12) go to the
/// higher threshold.
YoudenCutoff youden_cutoff(const RocCurve& curve);

enum class ScoreMode { range_calibrated, anchor_based };

/// Affine map from default log-odds to a 300..850 score, decreasing in risk.
struct ScoreScale {
    ScoreMode mode = ScoreMode::range_calibrated;
    // range_calibrated: logodds_lo -> 850, logodds_hi -> 300
    double logodds_lo = -9.0;
    double logodds_hi = -1.0;
    // anchor_based: anchor_score at good:bad odds anchor_odds, +pdo points per doubling of odds
    double anchor_score = 600.0;
    double anchor_odds = 50.0;
    double points_to_double_odds = 20.0;
    double min_score = 300.0;
    double max_score = 850.0;

    static ScoreScale range_calibrated(double logodds_lo, double logodds_hi);
    static ScoreScale anchor_based(double anchor_score, double anchor_odds, double points_to_double_odds);

    /// Unrounded, unclamped score of a default log-odds value.
    double raw_score(double default_logodds) const;
    /// Default log-odds at which raw_score equals `score`.
    double logodds_at(double score) const;
    void validate() const;
};

/// round(raw_score(ln(h / (1 - h)))) clamped to [300, 850]. Throws
/// std::invalid_argument unless 0 < h < 1.
int to_score(double hazard, const ScoreScale& scale);

struct ScoredRow {
    int score = 0;
    int status = 0;
    double weight = 1.0;
    double hazard = 0.0;
};

struct ScoreBand {
    int lo = 0;  // inclusive
    int hi = 0;  // inclusive
    double bads = 0.0;
    double goods = 0.0;
    double total = 0.0;
    double mean_hazard = 0.0;  // weighted; 0 for an empty band
};

/// Bands 300-350, 351-400, ... up to the scale maximum, ascending.
std::vector<ScoreBand> score_band_table(std::span<const ScoredRow> rows, int band_width = 50, int min_score = 300,
                                        int max_score = 850);

struct ConfusionMatrix {
    double tn = 0.0;
    double fp = 0.0;
    double fn = 0.0;
    double tp = 0.0;

    double total() const { return tn + fp + fn + tp; }
    bool operator==(const ConfusionMatrix&) const = default;
};

/// Predicted bad iff score < cutoff; rows weighted by `weight`.
ConfusionMatrix confusion_at(std::span<const ScoredRow> rows, int cutoff_score);

/// Undefined ratios (zero denominator) are empty rather than zero.
struct ClassificationMetrics {
    std::optional<double> accuracy;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
};

ClassificationMetrics classification_metrics(const ConfusionMatrix& m);

}  // namespace hazscore
