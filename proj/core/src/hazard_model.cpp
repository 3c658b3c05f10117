#include "hazscore/hazard_model.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "hazscore/numeric.hpp"
#include "hazscore/parallel.hpp"

namespace hazscore {

void DesignMatrix::add_row(std::span<const double> features, int status, double weight) {
    if (features.size() != cols()) throw std::invalid_argument("design row width does not match the column names");
    if (status != 0 && status != 1) throw std::invalid_argument("status must be 0 or 1");
    if (!(weight > 0.0) || !std::isfinite(weight)) throw std::invalid_argument("weight must be positive and finite");
    for (std::size_t j = 0; j < features.size(); ++j)
        if (!std::isfinite(features[j])) throw std::invalid_argument("regressor " + names_[j] + " is not finite");
    x_.insert(x_.end(), features.begin(), features.end());
    y_.push_back(static_cast<std::uint8_t>(status));
    w_.push_back(weight);
}

void DesignMatrix::reserve(std::size_t rows) {
    x_.reserve(rows * cols());
    y_.reserve(rows);
    w_.reserve(rows);
}

Coefficient make_coefficient(std::string name, double estimate, double standard_error) {
    Coefficient c;
    c.name = std::move(name);
    c.estimate = estimate;
    c.standard_error = standard_error;
    const double z = estimate / standard_error;
    c.wald_chi_square = z * z;
    c.p_value = chi_square_1df_upper(c.wald_chi_square);
    return c;
}

std::vector<double> CoefficientTable::estimates() const {
    std::vector<double> out;
    for (const auto& c : coefficients) out.push_back(c.estimate);
    return out;
}

std::vector<std::string> CoefficientTable::names() const {
    std::vector<std::string> out;
    for (const auto& c : coefficients) out.push_back(c.name);
    return out;
}

double chi_square_1df_upper(double x) {
    if (!(x > 0.0)) return 1.0;
    return std::erfc(std::sqrt(0.5 * x));
}

LikelihoodState evaluate_likelihood(const DesignMatrix& design, std::span<const double> beta, double weight_scale,
                                    unsigned threads, std::size_t chunk_rows) {
    const std::size_t p = design.cols() + 1;
    if (beta.size() != p) throw std::invalid_argument("beta has the wrong length");
    const std::size_t n = design.rows();
    chunk_rows = std::max<std::size_t>(chunk_rows, 1);
    const std::size_t n_chunks = (n + chunk_rows - 1) / chunk_rows;

    struct Partial {
        CompensatedSum ll;
        std::vector<CompensatedSum> grad;
        std::vector<double> info;  // upper triangle, packed row-major
        double max_abs_eta = 0.0;
    };
    std::vector<Partial> partials(n_chunks);

    parallel_for(n_chunks, threads, [&](std::size_t c) {
        auto& part = partials[c];
        part.grad.assign(p, {});
        part.info.assign(p * (p + 1) / 2, 0.0);
        std::vector<double> xr(p);
        xr[0] = 1.0;
        const std::size_t end = std::min(n, (c + 1) * chunk_rows);
        for (std::size_t i = c * chunk_rows; i < end; ++i) {
            const auto x = design.row(i);
            std::copy(x.begin(), x.end(), xr.begin() + 1);
            double eta = 0.0;
            for (std::size_t j = 0; j < p; ++j) eta += beta[j] * xr[j];
            const double h = logistic(eta);
            const double w = design.weight(i) * weight_scale;
            const int y = design.status(i);
            part.ll.add(w * (y * eta - softplus(eta)));
            const double r = w * (y - h);
            for (std::size_t j = 0; j < p; ++j) part.grad[j].add(r * xr[j]);
            const double v = w * h * (1.0 - h);
            std::size_t k = 0;
            for (std::size_t a = 0; a < p; ++a) {
                const double va = v * xr[a];
                for (std::size_t b = a; b < p; ++b) part.info[k++] += va * xr[b];
            }
            part.max_abs_eta = std::max(part.max_abs_eta, std::fabs(eta));
        }
    });

    LikelihoodState state;
    CompensatedSum ll;
    std::vector<CompensatedSum> grad(p);
    std::vector<double> packed(p * (p + 1) / 2, 0.0);
    for (const auto& part : partials) {
        ll.add(part.ll);
        for (std::size_t j = 0; j < p; ++j) grad[j].add(part.grad[j]);
        for (std::size_t k = 0; k < packed.size(); ++k) packed[k] += part.info[k];
        state.max_abs_eta = std::max(state.max_abs_eta, part.max_abs_eta);
    }
    state.log_likelihood = ll.value();
    state.gradient.resize(p);
    for (std::size_t j = 0; j < p; ++j) state.gradient[j] = grad[j].value();
    state.information.assign(p * p, 0.0);
    std::size_t k = 0;
    for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = a; b < p; ++b) {
            state.information[a * p + b] = packed[k];
            state.information[b * p + a] = packed[k];
            ++k;
        }
    return state;
}

namespace {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

constexpr double kRankTolerance = 1e-11;

Matrix to_matrix(const std::vector<double>& packed, std::size_t p) {
    Matrix m(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
    for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = 0; b < p; ++b)
            m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = packed[a * p + b];
    return m;
}

// Unit-diagonal rescaling; columns with no information map to zero rows.
Matrix scaled(const Matrix& info, Vector& inv_sqrt_diag) {
    inv_sqrt_diag = info.diagonal().unaryExpr([](double d) { return d > 0.0 ? 1.0 / std::sqrt(d) : 0.0; });
    return inv_sqrt_diag.asDiagonal() * info * inv_sqrt_diag.asDiagonal();
}

double min_eigenvalue(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
}

std::vector<std::string> dependent_columns(const Matrix& info, const std::vector<std::string>& names) {
    Vector isd;
    const Matrix s = scaled(info, isd);
    std::vector<Eigen::Index> kept;
    std::vector<std::string> dependent;
    for (Eigen::Index c = 0; c < s.rows(); ++c) {
        if (isd(c) == 0.0) {
            dependent.push_back(names[static_cast<std::size_t>(c)]);
            continue;
        }
        auto trial = kept;
        trial.push_back(c);
        Matrix sub(static_cast<Eigen::Index>(trial.size()), static_cast<Eigen::Index>(trial.size()));
        for (std::size_t a = 0; a < trial.size(); ++a)
            for (std::size_t b = 0; b < trial.size(); ++b)
                sub(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = s(trial[a], trial[b]);
        if (min_eigenvalue(sub) < kRankTolerance)
            dependent.push_back(names[static_cast<std::size_t>(c)]);
        else
            kept = std::move(trial);
    }
    return dependent;
}

[[noreturn]] void throw_singular(const Matrix& info, const std::vector<std::string>& names) {
    auto cols = dependent_columns(info, names);
    std::string msg = "singular information matrix; linearly dependent columns:";
    for (const auto& c : cols) msg += " " + c;
    throw SingularInformationError(msg, std::move(cols));
}

void add_ridge(LikelihoodState& s, std::span<const double> beta, double ridge) {
    if (ridge <= 0.0) return;
    const std::size_t p = beta.size();
    for (std::size_t j = 1; j < p; ++j) {
        s.log_likelihood -= 0.5 * ridge * beta[j] * beta[j];
        s.gradient[j] -= ridge * beta[j];
        s.information[j * p + j] += ridge;
    }
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

}  // namespace

CoefficientTable fit(const DesignMatrix& design, const FitOptions& options) {
    const std::size_t n = design.rows();
    const std::size_t p = design.cols() + 1;
    if (n == 0) throw FitError("no rows to fit");

    std::vector<std::string> names{"Intercept"};
    names.insert(names.end(), design.names().begin(), design.names().end());

    CompensatedSum wsum, wysum;
    for (std::size_t i = 0; i < n; ++i) {
        wsum.add(design.weight(i));
        if (design.status(i) == 1) wysum.add(design.weight(i));
    }
    const double total_w = wsum.value();
    const double pbar = wysum.value() / total_w;
    if (!(pbar > 0.0 && pbar < 1.0)) throw FitError("both statuses must be present to fit");

    std::vector<std::string> constant;
    for (std::size_t j = 0; j < design.cols(); ++j) {
        const double first = design.row(0)[j];
        bool same = true;
        for (std::size_t i = 1; i < n && same; ++i) same = design.row(i)[j] == first;
        if (same) constant.push_back(design.names()[j]);
    }
    if (!constant.empty()) {
        std::string msg = "constant regressor(s):";
        for (const auto& c : constant) msg += " " + c;
        throw SingularInformationError(msg, constant);
    }

    const double scale = static_cast<double>(n) / total_w;
    std::vector<double> beta(p, 0.0);
    beta[0] = std::log(pbar / (1.0 - pbar));

    const auto eval = [&](const std::vector<double>& b) {
        auto s = evaluate_likelihood(design, b, scale, options.threads, options.chunk_rows);
        add_ridge(s, b, options.ridge);
        return s;
    };

    auto state = eval(beta);
    {
        Vector isd;
        const Matrix s = scaled(to_matrix(state.information, p), isd);
        if ((isd.array() == 0.0).any() || min_eigenvalue(s) < kRankTolerance)
            throw_singular(to_matrix(state.information, p), names);
    }

    int iter = 0;
    for (;; ++iter) {
        if (max_abs(state.gradient) <= options.tol) break;
        if (iter >= options.max_iter)
            throw ConvergenceError("no convergence after " + std::to_string(options.max_iter) +
                                       " iterations (max |gradient| " + std::to_string(max_abs(state.gradient)) + ")",
                                   beta);
        const Matrix info = to_matrix(state.information, p);
        Vector isd;
        const Matrix s = scaled(info, isd);
        Eigen::LDLT<Matrix> ldlt(s);
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
            ldlt.vectorD().minCoeff() < kRankTolerance * ldlt.vectorD().maxCoeff())
            throw_singular(info, names);
        const Vector g = Eigen::Map<const Vector>(state.gradient.data(), static_cast<Eigen::Index>(p));
        const Vector step = isd.asDiagonal() * ldlt.solve(isd.asDiagonal() * g);

        double t = 1.0;
        bool accepted = false;
        for (int h = 0; h <= options.max_halvings; ++h, t *= 0.5) {
            std::vector<double> cand(p);
            for (std::size_t j = 0; j < p; ++j) cand[j] = beta[j] + t * step(static_cast<Eigen::Index>(j));
            auto cs = eval(cand);
            const double slack = 1e-12 * std::max(1.0, std::fabs(state.log_likelihood));
            if (std::isfinite(cs.log_likelihood) && cs.log_likelihood >= state.log_likelihood - slack) {
                beta = std::move(cand);
                state = std::move(cs);
                accepted = true;
                break;
            }
        }
        if (!accepted)
            throw ConvergenceError("step halving could not increase the likelihood (max |gradient| " +
                                       std::to_string(max_abs(state.gradient)) + ")",
                                   beta);
        if (state.max_abs_eta > options.separation_eta)
            throw SeparationError("complete or quasi-complete separation: |linear predictor| reached " +
                                  std::to_string(state.max_abs_eta));
    }

    const Matrix info = to_matrix(state.information, p);
    Vector isd;
    const Matrix s = scaled(info, isd);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(s);
    if (eig.eigenvalues().minCoeff() < kRankTolerance) throw_singular(info, names);
    const Matrix cov_scaled = eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() *
                              eig.eigenvectors().transpose();

    CoefficientTable table;
    for (std::size_t j = 0; j < p; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        // info was accumulated with weights * scale, so raw variance = scale * inverse.
        const double var = scale * cov_scaled(jj, jj) * isd(jj) * isd(jj);
        table.coefficients.push_back(make_coefficient(names[j], beta[j], std::sqrt(var)));
    }
    table.iterations = iter;
    table.gradient_max = max_abs(state.gradient);
    double penalty = 0.0;
    if (options.ridge > 0.0)
        for (std::size_t j = 1; j < p; ++j) penalty += 0.5 * options.ridge * beta[j] * beta[j];
    table.log_likelihood = (state.log_likelihood + penalty) / scale;
    table.weight_sum = total_w;
    table.rows = static_cast<std::int64_t>(n);
    table.information_condition = eig.eigenvalues().maxCoeff() / eig.eigenvalues().minCoeff();
    return table;
}

double predict_hazard(std::span<const double> features, std::span<const double> beta) {
    if (beta.size() != features.size() + 1) throw std::invalid_argument("coefficient count does not match features");
    double eta = beta[0];
    for (std::size_t j = 0; j < features.size(); ++j) eta += beta[j + 1] * features[j];
    // Saturated tails are pulled back inside (0, 1).
    return std::clamp(logistic(eta), std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0));
}

double horizon_pd(std::span<const double> monthly_hazards) {
    double survival = 1.0;
    for (double h : monthly_hazards) {
        if (!(h >= 0.0 && h < 1.0)) throw std::invalid_argument("monthly hazard outside [0, 1)");
        survival *= 1.0 - h;
    }
    return 1.0 - survival;
}

std::string format_p_value(double p) {
    if (p < 1e-4) return "<.0001";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", p);
    return buf;
}

std::string wald_report(const CoefficientTable& table) {
    std::size_t width = std::string("Parameter").size();
    for (const auto& c : table.coefficients) width = std::max(width, c.name.size());
    std::ostringstream out;
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%-*s %14s %14s %16s %10s\n", static_cast<int>(width), "Parameter", "Estimate",
                  "Standard Error", "Wald Chi-Square", "Pr > ChiSq");
    out << buf;
    for (const auto& c : table.coefficients) {
        std::snprintf(buf, sizeof(buf), "%-*s %14.6g %14.6g %16.4f %10s\n", static_cast<int>(width), c.name.c_str(),
                      c.estimate, c.standard_error, c.wald_chi_square, format_p_value(c.p_value).c_str());
        out << buf;
    }
    return out.str();
}

std::vector<double> correlation_matrix(const DesignMatrix& design) {
    const std::size_t p = design.cols();
    const std::size_t n = design.rows();
    std::vector<CompensatedSum> mean_acc(p);
    CompensatedSum wsum;
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = design.row(i);
        const double w = design.weight(i);
        wsum.add(w);
        for (std::size_t j = 0; j < p; ++j) mean_acc[j].add(w * x[j]);
    }
    std::vector<double> mean(p);
    for (std::size_t j = 0; j < p; ++j) mean[j] = mean_acc[j].value() / wsum.value();
    std::vector<double> cov(p * p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = design.row(i);
        const double w = design.weight(i);
        for (std::size_t a = 0; a < p; ++a)
            for (std::size_t b = a; b < p; ++b) cov[a * p + b] += w * (x[a] - mean[a]) * (x[b] - mean[b]);
    }
    std::vector<double> corr(p * p, 0.0);
    for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = a; b < p; ++b) {
            const double denom = std::sqrt(cov[a * p + a] * cov[b * p + b]);
            const double r = denom > 0.0 ? cov[a * p + b] / denom : (a == b ? 1.0 : 0.0);
            corr[a * p + b] = corr[b * p + a] = r;
        }
    return corr;
}

}  // namespace hazscore
