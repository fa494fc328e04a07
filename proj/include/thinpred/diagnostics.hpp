#pragma once

// ARCH diagnostics for forecast residuals.
//
// Binomial thinning of an AR(1) process makes the conditional variance of the
// observed series, Var(Y_t | X_t) = X_t p (1 - p), follow the same AR
// recursion as X itself, so residuals of a model fitted to thinned data carry
// autoregressive conditional heteroskedasticity. Engle's Lagrange multiplier
// test detects it: regress e_t^2 on a constant and L of its own lags; under
// the no-ARCH null, LM = n_eff R^2 is asymptotically chi-square with L
// degrees of freedom. Here n_eff = n - L, the rows left after lagging, and one
// regression is run per cumulative lag L = 1..max_lag.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/special_functions/gamma.hpp>

#include "thinpred/errors.hpp"
#include "thinpred/format.hpp"
#include "thinpred/forecast.hpp"
#include "thinpred/sampling.hpp"

namespace thinpred {

inline constexpr double kArchSignificance = 0.05;

/// Upper tail P(chi2_dof > x).
[[nodiscard]] inline double chi_square_sf(double x, int dof) {
    if (dof < 1) fail_argument("chi_square_sf: dof must be >= 1");
    if (!(x >= 0.0)) fail_argument("chi_square_sf: x must be >= 0");
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    return boost::math::gamma_q(0.5 * dof, 0.5 * x);
}

[[nodiscard]] inline double chi_square_cdf(double x, int dof) {
    if (dof < 1) fail_argument("chi_square_cdf: dof must be >= 1");
    if (!(x >= 0.0)) fail_argument("chi_square_cdf: x must be >= 0");
    if (x == 0.0) return 0.0;
    return boost::math::gamma_p(0.5 * dof, 0.5 * x);
}

struct ArchLagRecord {
    int lag = 0;
    double lm = 0.0;
    double p_value = 1.0;
    std::size_t n_effective = 0;

    [[nodiscard]] bool rejects(double alpha = kArchSignificance) const { return p_value < alpha; }
};

struct ArchTestResult {
    std::vector<ArchLagRecord> lags;
    int max_lag = 0;
    std::size_t n_effective = 0;  // rows used at max_lag

    /// Fraction of lags in [from, to] whose p-value is below alpha.
    [[nodiscard]] double rejection_fraction(int from, int to, double alpha = kArchSignificance) const {
        int hit = 0;
        int total = 0;
        for (const auto& r : lags) {
            if (r.lag < from || r.lag > to) continue;
            ++total;
            if (r.rejects(alpha)) ++hit;
        }
        return total == 0 ? 0.0 : static_cast<double>(hit) / total;
    }
};

/// One LM regression of e^2 on a constant and lags 1..L. Householder QR
/// without pivoting, so rescaling the residuals by a power of two leaves the
/// statistic bit-identical.
[[nodiscard]] inline ArchLagRecord arch_lm_at_lag(std::span<const double> sq, int lag) {
    const std::size_t L = static_cast<std::size_t>(lag);
    const std::size_t rows = sq.size() - L;
    Eigen::MatrixXd design(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(L + 1));
    Eigen::VectorXd response(static_cast<Eigen::Index>(rows));
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t t = L + r;
        const auto ri = static_cast<Eigen::Index>(r);
        design(ri, 0) = 1.0;
        for (std::size_t j = 1; j <= L; ++j) design(ri, static_cast<Eigen::Index>(j)) = sq[t - j];
        response(ri) = sq[t];
    }
    const double mean = response.mean();
    const double sst = (response.array() - mean).square().sum();
    if (!(sst > 0.0)) fail_undefined("elm_arch_test: squared residuals are constant");
    const Eigen::VectorXd coef = design.householderQr().solve(response);
    const double ssr = (response - design * coef).squaredNorm();
    const double r2 = std::clamp(1.0 - ssr / sst, 0.0, 1.0);
    ArchLagRecord rec;
    rec.lag = lag;
    rec.n_effective = rows;
    rec.lm = static_cast<double>(rows) * r2;
    rec.p_value = chi_square_sf(rec.lm, lag);
    return rec;
}

[[nodiscard]] inline ArchTestResult elm_arch_test(std::span<const double> residuals, int max_lag) {
    if (max_lag < 1) fail_argument("elm_arch_test: max_lag must be >= 1");
    if (residuals.size() < static_cast<std::size_t>(max_lag) + 20) {
        fail_argument("elm_arch_test: need at least max_lag + 20 residuals (have " +
                      std::to_string(residuals.size()) + ")");
    }
    std::vector<double> sq(residuals.size());
    for (std::size_t i = 0; i < residuals.size(); ++i) sq[i] = residuals[i] * residuals[i];
    ArchTestResult out;
    out.max_lag = max_lag;
    out.lags.reserve(static_cast<std::size_t>(max_lag));
    for (int L = 1; L <= max_lag; ++L) out.lags.push_back(arch_lm_at_lag(sq, L));
    out.n_effective = out.lags.back().n_effective;
    return out;
}

inline void write_arch_csv(const ArchTestResult& result, std::ostream& out) {
    out << "lag,lm,p_value\n";
    for (const auto& r : result.lags) {
        out << r.lag << ',' << format_number(r.lm) << ',' << format_number(r.p_value) << '\n';
    }
}

struct VarianceRecursion {
    double coefficient = 0.0;  // AR(1) coefficient of v_t
    double intercept = 0.0;
    std::vector<double> scaled_noise;  // regression residuals, the eps'_t term
};

/// Conditional variance proxy v_t = x_t p (1 - p) of a thinned series and its
/// AR(1) regression v_t = c + a v_{t-1} + eps'_t. For an AR(1) ground truth
/// the coefficient recovers the generating coefficient.
[[nodiscard]] inline VarianceRecursion conditional_variance_recursion(std::span<const double> ground,
                                                                      double rate) {
    check_rate(rate);
    if (!(rate > 0.0 && rate < 1.0)) {
        fail_undefined("conditional_variance_recursion: thinning variance vanishes at p = 0 or p = 1");
    }
    std::vector<double> v(ground.size());
    for (std::size_t t = 0; t < ground.size(); ++t) v[t] = ground[t] * rate * (1.0 - rate);
    const auto fit = fit_ar(v, 1);
    VarianceRecursion out;
    out.coefficient = fit.ar[0];
    out.intercept = fit.intercept;
    out.scaled_noise.reserve(v.size() - 1);
    for (std::size_t t = 1; t < v.size(); ++t) {
        out.scaled_noise.push_back(v[t] - fit.intercept - fit.ar[0] * v[t - 1]);
    }
    return out;
}

}  // namespace thinpred
