#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hazscore {

/// Row-major regressor matrix (intercept implicit) with binary response and
/// positive weights.
class DesignMatrix {
public:
    DesignMatrix() = default;
    explicit DesignMatrix(std::vector<std::string> names) : names_(std::move(names)) {}

    void add_row(std::span<const double> features, int status, double weight);
    void reserve(std::size_t rows);

    std::size_t rows() const { return y_.size(); }
    std::size_t cols() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }

    std::span<const double> row(std::size_t i) const { return {x_.data() + i * cols(), cols()}; }
    int status(std::size_t i) const { return y_[i]; }
    double weight(std::size_t i) const { return w_[i]; }

private:
    std::vector<std::string> names_;
    std::vector<double> x_;
    std::vector<std::uint8_t> y_;
    std::vector<double> w_;
};

struct FitOptions {
    double tol = 1e-8;  // on max |gradient| with weights scaled to mean 1
    int max_iter = 50;
    double ridge = 0.0;  // L2 penalty on slopes, same weight scale
    unsigned threads = 0;
    std::size_t chunk_rows = 8192;  // fixed reduction blocks; results do not depend on threads
    int max_halvings = 40;
    double separation_eta = 50.0;  // |linear predictor| beyond this signals separation
};

class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConvergenceError : public FitError {
public:
    ConvergenceError(const std::string& what, std::vector<double> last_iterate)
        : FitError(what), last_iterate_(std::move(last_iterate)) {}
    const std::vector<double>& last_iterate() const { return last_iterate_; }

private:
    std::vector<double> last_iterate_;
};

class SingularInformationError : public FitError {
public:
    SingularInformationError(const std::string& what, std::vector<std::string> columns)
        : FitError(what), columns_(std::move(columns)) {}
    const std::vector<std::string>& columns() const { return columns_; }

private:
    std::vector<std::string> columns_;
};

class SeparationError : public FitError {
public:
    using FitError::FitError;
};

struct Coefficient {
    std::string name;
    double estimate = 0.0;
    double standard_error = 0.0;
    double wald_chi_square = 0.0;
    double p_value = 1.0;
};

/// Wald chi-square (est/se)^2 and its 1-df upper-tail p-value.
Coefficient make_coefficient(std::string name, double estimate, double standard_error);

struct CoefficientTable {
    std::vector<Coefficient> coefficients;  // intercept first
    int iterations = 0;
    double gradient_max = 0.0;
    double log_likelihood = 0.0;  // with the raw weights
    double weight_sum = 0.0;
    std::int64_t rows = 0;
    double information_condition = 0.0;  // of the unit-diagonal scaled information

    std::vector<double> estimates() const;
    std::vector<std::string> names() const;
};

/// Maximizes sum w [y ln h + (1-y) ln(1-h)], h = logistic(x'b), by Newton-IRLS
/// with step halving. Standard errors come from the inverse information.
CoefficientTable fit(const DesignMatrix& design, const FitOptions& options = {});

/// Log-likelihood, gradient and information at `beta` (intercept first),
/// accumulated over fixed row blocks with compensated sums.
struct LikelihoodState {
    double log_likelihood = 0.0;
    std::vector<double> gradient;
    std::vector<double> information;  // p x p, row-major, full
    double max_abs_eta = 0.0;
};

LikelihoodState evaluate_likelihood(const DesignMatrix& design, std::span<const double> beta, double weight_scale = 1.0,
                                    unsigned threads = 1, std::size_t chunk_rows = 8192);

/// logistic(beta_0 + sum beta_j x_j), kept strictly inside (0, 1); `beta` has
/// the intercept first.
double predict_hazard(std::span<const double> features, std::span<const double> beta);

/// 1 - prod(1 - h_t). Throws std::invalid_argument if a hazard is outside [0, 1).
double horizon_pd(std::span<const double> monthly_hazards);

/// P(chi2_1 > x) = erfc(sqrt(x / 2)).
double chi_square_1df_upper(double x);

/// Fixed-width table: Parameter, Estimate, Standard Error, Wald Chi-Square,
/// Pr > ChiSq; p-values under 1e-4 printed as "<.0001".
std::string wald_report(const CoefficientTable& table);
std::string format_p_value(double p);

/// Weighted Pearson correlation matrix of the regressors (p x p, row-major).
std::vector<double> correlation_matrix(const DesignMatrix& design);

}  // namespace hazscore
