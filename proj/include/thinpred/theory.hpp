#pragma once

// Closed-form effect of binomial thinning at rate p on second-order moments.
//
//   Sigma_Y = p^2 Sigma_X + p (1 - p) E[X] I
//
// Off-diagonal (lagged) covariances shrink by p^2, while variances also pick
// up the thinning noise p (1 - p) E[X]. For a stationary ground truth this
// gives the thinned autocorrelation
//
//   rho_Y = p^2 Cov(X_i, X_j) / (p^2 Var(X) + p (1 - p) E[X])
//
// whose magnitude is non-decreasing in p, and the covariance with any
// external signal S,
//
//   Cov(Y, S) = p Cov(X, S).
//
// All functions take moment summaries, so they accept analytic values or
// plug-in estimates alike.

#include <cmath>
#include <cstddef>
#include <string>

#include <Eigen/Dense>

#include "thinpred/errors.hpp"
#include "thinpred/sampling.hpp"

namespace thinpred {

struct SampledCovariance {
    double ground_variance = 0.0;  // Var(X)
    double ground_mean = 0.0;      // E[X]
    double ground_cross = 0.0;     // Cov(X_i, X_j) at the lag of interest
    double rate = 1.0;             // p

    void validate() const {
        check_rate(rate);
        if (!(ground_variance >= 0.0)) fail_argument("SampledCovariance: variance must be >= 0");
        if (!(ground_mean >= 0.0)) fail_argument("SampledCovariance: mean must be >= 0");
    }
};

[[nodiscard]] inline double sampled_variance(const SampledCovariance& sc) {
    sc.validate();
    const double p = sc.rate;
    return p * p * sc.ground_variance + p * (1.0 - p) * sc.ground_mean;
}

[[nodiscard]] inline double sampled_cross_covariance(const SampledCovariance& sc) {
    sc.validate();
    return sc.rate * sc.rate * sc.ground_cross;
}

[[nodiscard]] inline double predicted_autocorrelation(const SampledCovariance& sc) {
    const double denom = sampled_variance(sc);
    if (!(denom > 0.0)) {
        fail_undefined("predicted_autocorrelation: thinned variance is zero (p = 0 or degenerate signal)");
    }
    return sampled_cross_covariance(sc) / denom;
}

/// d/dp of rho_Y(p)^2 in the general two-time form
///   p C^2 (V_i E_j p + E_i V_j p + 2 E_i E_j (1 - p))
///   / ((V_i p - E_i p + E_i)^2 (V_j p - E_j p + E_j)^2)
/// evaluated with V_i = V_j and E_i = E_j (stationary case).
[[nodiscard]] inline double autocorrelation_sq_derivative(const SampledCovariance& sc) {
    sc.validate();
    const double p = sc.rate;
    const double c = sc.ground_cross;
    const double v = sc.ground_variance;
    const double e = sc.ground_mean;
    const double num = p * c * c * (v * e * p + e * v * p + 2.0 * e * e * (1.0 - p));
    const double base = v * p - e * p + e;
    const double den = base * base * base * base;
    if (!(den > 0.0)) fail_undefined("autocorrelation_sq_derivative: degenerate denominator");
    return num / den;
}

[[nodiscard]] inline double predicted_external_covariance(double cov_xs, double rate) {
    check_rate(rate);
    return rate * cov_xs;
}

/// Exact thinned Pearson correlation with an external signal:
///   p Cov(X, S) / (sqrt(p^2 Var(X) + p (1 - p) E[X]) sigma_S),
/// with Cov(X, S) = rho_XS sigma_X sigma_S. When Var(X) >> E[X] this tends to
/// rho_XS; when Var(X) ~ E[X] it decays with p.
[[nodiscard]] inline double predicted_external_pearson(double rho_xs, const SampledCovariance& sc,
                                                       double sigma_s) {
    if (!(sigma_s > 0.0)) fail_undefined("predicted_external_pearson: sigma_S must be > 0");
    const double var_y = sampled_variance(sc);
    if (!(var_y > 0.0)) fail_undefined("predicted_external_pearson: thinned variance is zero");
    const double cov_xs = rho_xs * std::sqrt(sc.ground_variance) * sigma_s;
    return predicted_external_covariance(cov_xs, sc.rate) / (std::sqrt(var_y) * sigma_s);
}

/// Full matrix form: p^2 Sigma_X + p (1 - p) E[X] I.
[[nodiscard]] inline Eigen::MatrixXd sampled_covariance_matrix(const Eigen::MatrixXd& sigma_x,
                                                               double ground_mean, double rate) {
    check_rate(rate);
    if (sigma_x.rows() != sigma_x.cols()) fail_argument("sampled_covariance_matrix: matrix must be square");
    if (!(ground_mean >= 0.0)) fail_argument("sampled_covariance_matrix: mean must be >= 0");
    Eigen::MatrixXd out = rate * rate * sigma_x;
    out.diagonal().array() += rate * (1.0 - rate) * ground_mean;
    return out;
}

}  // namespace thinpred
