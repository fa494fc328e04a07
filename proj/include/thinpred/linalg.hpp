#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "thinpred/errors.hpp"

namespace thinpred {

struct LeastSquaresFit {
    Eigen::VectorXd coef;
    Eigen::VectorXd residuals;
    double ssr = 0.0;  // sum of squared residuals
};

namespace detail {

inline constexpr double kRankThreshold = 1e-10;

}  // namespace detail

/// Ordinary least squares through a column-pivoted QR. Rank-deficient
/// designs throw std::domain_error.
[[nodiscard]] inline LeastSquaresFit least_squares(const Eigen::MatrixXd& design,
                                                   const Eigen::VectorXd& response,
                                                   const char* who = "least_squares") {
    if (design.rows() != response.size()) fail_argument(std::string(who) + ": row count mismatch");
    if (design.rows() < design.cols()) {
        fail_undefined(std::string(who) + ": fewer observations than regressors");
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(detail::kRankThreshold);
    if (qr.rank() < design.cols()) fail_undefined(std::string(who) + ": singular design matrix");
    LeastSquaresFit fit;
    fit.coef = qr.solve(response);
    fit.residuals = response - design * fit.coef;
    fit.ssr = fit.residuals.squaredNorm();
    return fit;
}

/// Roots of 1 + c_1 z + ... + c_k z^k. Trailing zero coefficients lower the
/// degree. Computed as reciprocals of the companion-matrix eigenvalues of
/// z^k + c_1 z^{k-1} + ... + c_k.
[[nodiscard]] inline std::vector<std::complex<double>> polynomial_roots(std::span<const double> c) {
    std::size_t k = c.size();
    while (k > 0 && c[k - 1] == 0.0) --k;
    if (k == 0) return {};
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k),
                                                      static_cast<Eigen::Index>(k));
    for (std::size_t j = 0; j < k; ++j) companion(0, static_cast<Eigen::Index>(j)) = -c[j];
    for (std::size_t i = 1; i < k; ++i) {
        companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    std::vector<std::complex<double>> roots;
    roots.reserve(k);
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        roots.push_back(1.0 / solver.eigenvalues()(i));
    }
    return roots;
}

/// True when every root of 1 + c_1 z + ... + c_k z^k satisfies |z| >= 1 + margin.
[[nodiscard]] inline bool roots_outside_unit_disk(std::span<const double> c, double margin = 1e-9) {
    for (const auto& r : polynomial_roots(c)) {
        if (!(std::abs(r) >= 1.0 + margin)) return false;
    }
    return true;
}

}  // namespace thinpred
