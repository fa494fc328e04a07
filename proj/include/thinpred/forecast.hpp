#pragma once

// One-step-ahead predictors and their scoring.
//
// ARMA coefficients are estimated with Hannan-Rissanen: a long autoregression
// (order ceil(min(n/10, 20))) supplies innovation proxies, then x_t is
// regressed on a constant, its own lags, the lagged proxies and, optionally,
// a contemporaneous external series. With no MA part this is plain
// conditional least squares. Order selection minimises the Gaussian profile
// AIC, n ln(sigma^2) + 2 (#parameters), over a common estimation sample so
// candidates are comparable.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "thinpred/errors.hpp"
#include "thinpred/format.hpp"
#include "thinpred/linalg.hpp"

namespace thinpred {

struct ArmaOrder {
    std::size_t ar = 0;
    std::size_t ma = 0;

    friend bool operator==(const ArmaOrder&, const ArmaOrder&) = default;
};

struct ArmaFit {
    std::vector<double> ar;
    std::vector<double> ma;
    double intercept = 0.0;  // regression constant
    std::optional<double> external_coef;
    double noise_std = 0.0;  // residual RMS
    std::size_t observations = 0;

    [[nodiscard]] std::size_t parameter_count() const {
        return ar.size() + ma.size() + 1 + (external_coef ? 1 : 0);
    }

    [[nodiscard]] double aic() const {
        const double s2 = std::max(noise_std * noise_std, std::numeric_limits<double>::min());
        return static_cast<double>(observations) * std::log(s2) + 2.0 * static_cast<double>(parameter_count());
    }
};

struct PoissonRate {
    double rate = 0.0;
};

struct ForecastRun {
    std::size_t train_length = 0;
    std::size_t horizon = 0;
    std::vector<double> predictions;
    std::vector<double> actuals;
    std::vector<double> residuals;  // actual - prediction
    std::variant<ArmaFit, PoissonRate> model;
    std::size_t refits = 0;
    std::size_t failed_refits = 0;  // refits that kept the previous model
};

namespace detail {

inline std::size_t long_ar_order(std::size_t n) {
    return static_cast<std::size_t>(std::ceil(std::min(static_cast<double>(n) / 10.0, 20.0)));
}

inline void check_external(std::span<const double> x, std::span<const double> external, const char* who) {
    if (!external.empty() && external.size() != x.size()) {
        fail_argument(std::string(who) + ": external series length " + std::to_string(external.size()) +
                      " does not match series length " + std::to_string(x.size()));
    }
}

// Regression of x_t, t in [start, n), on
// [1, x_{t-1..t-k}, innov_{t-1..t-l}, external_t].
inline ArmaFit regress_arma(std::span<const double> x, std::size_t k, std::size_t l,
                            std::span<const double> innovations, std::span<const double> external,
                            std::size_t start, const char* who) {
    const std::size_t n = x.size();
    if (start >= n) fail_argument(std::string(who) + ": no observations left after lagging");
    const std::size_t rows = n - start;
    const std::size_t cols = 1 + k + l + (external.empty() ? 0 : 1);
    Eigen::MatrixXd design(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    Eigen::VectorXd response(static_cast<Eigen::Index>(rows));
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t t = start + r;
        const auto ri = static_cast<Eigen::Index>(r);
        Eigen::Index c = 0;
        design(ri, c++) = 1.0;
        for (std::size_t i = 1; i <= k; ++i) design(ri, c++) = x[t - i];
        for (std::size_t j = 1; j <= l; ++j) design(ri, c++) = innovations[t - j];
        if (!external.empty()) design(ri, c++) = external[t];
        response(ri) = x[t];
    }
    const auto ls = least_squares(design, response, who);
    ArmaFit fit;
    Eigen::Index c = 0;
    fit.intercept = ls.coef(c++);
    for (std::size_t i = 0; i < k; ++i) fit.ar.push_back(ls.coef(c++));
    for (std::size_t j = 0; j < l; ++j) fit.ma.push_back(ls.coef(c++));
    if (!external.empty()) fit.external_coef = ls.coef(c++);
    fit.observations = rows;
    fit.noise_std = std::sqrt(ls.ssr / static_cast<double>(rows));
    return fit;
}

// Stage-one innovation proxies: residuals of a long AR fit, zero before its
// first usable row.
inline std::vector<double> long_ar_innovations(std::span<const double> x, std::size_t m) {
    const auto fit = regress_arma(x, m, 0, {}, {}, m, "fit_arma (long AR stage)");
    std::vector<double> innov(x.size(), 0.0);
    for (std::size_t t = m; t < x.size(); ++t) {
        double pred = fit.intercept;
        for (std::size_t i = 0; i < m; ++i) pred += fit.ar[i] * x[t - 1 - i];
        innov[t] = x[t] - pred;
    }
    return innov;
}

inline void check_invertible(const ArmaFit& fit) {
    if (!roots_outside_unit_disk(fit.ma)) {
        fail_undefined("fit_arma: estimated MA polynomial is not invertible");
    }
}

inline std::size_t arma_start(std::size_t n, std::size_t k, std::size_t l) {
    return l == 0 ? k : std::max(k, long_ar_order(n) + l);
}

inline ArmaFit fit_arma_from(std::span<const double> x, std::size_t k, std::size_t l,
                             std::span<const double> external, std::size_t start,
                             const std::vector<double>* innovations) {
    if (l == 0) return regress_arma(x, k, 0, {}, external, start, "fit_arma");
    std::vector<double> local;
    if (innovations == nullptr) {
        local = long_ar_innovations(x, long_ar_order(x.size()));
        innovations = &local;
    }
    auto fit = regress_arma(x, k, l, *innovations, external, start, "fit_arma");
    check_invertible(fit);
    return fit;
}

}  // namespace detail

/// Conditional least squares AR(k): x_t on (1, x_{t-1}, ..., x_{t-k}).
[[nodiscard]] inline ArmaFit fit_ar(std::span<const double> x, std::size_t k) {
    if (x.size() < 3 * k + 10) {
        fail_argument("fit_ar: series of length " + std::to_string(x.size()) + " is too short for order " +
                      std::to_string(k) + " (need " + std::to_string(3 * k + 10) + ")");
    }
    return detail::regress_arma(x, k, 0, {}, {}, k, "fit_ar");
}

/// Hannan-Rissanen ARMA(k, l), optionally with an external regressor.
[[nodiscard]] inline ArmaFit fit_arma(std::span<const double> x, std::size_t k, std::size_t l,
                                      std::span<const double> external = {}) {
    detail::check_external(x, external, "fit_arma");
    if (l == 0 && external.empty()) return fit_ar(x, k);
    if (x.size() < 3 * (k + l) + 20) {
        fail_argument("fit_arma: series of length " + std::to_string(x.size()) + " is too short for order (" +
                      std::to_string(k) + ", " + std::to_string(l) + ")");
    }
    return detail::fit_arma_from(x, k, l, external, detail::arma_start(x.size(), k, l), nullptr);
}

[[nodiscard]] inline bool arma_order_feasible(std::size_t n, ArmaOrder order) {
    return order.ma == 0 ? n >= 3 * order.ar + 10 : n >= 3 * (order.ar + order.ma) + 20;
}

/// Minimum-AIC order over [0, k_max] x [0, l_max]; ties go to the smaller
/// k + l, then the smaller k. Candidates whose fit fails are skipped.
[[nodiscard]] inline ArmaOrder select_order_aic(std::span<const double> x, std::size_t k_max,
                                                std::size_t l_max, std::span<const double> external = {}) {
    detail::check_external(x, external, "select_order_aic");
    const std::size_t n = x.size();
    std::vector<ArmaOrder> candidates;
    std::size_t k_feasible = 0;
    std::size_t l_feasible = 0;
    for (std::size_t total = 0; total <= k_max + l_max; ++total) {
        for (std::size_t k = 0; k <= std::min(total, k_max); ++k) {
            const std::size_t l = total - k;
            if (l > l_max) continue;
            if (!arma_order_feasible(n, {k, l})) continue;
            candidates.push_back({k, l});
            k_feasible = std::max(k_feasible, k);
            l_feasible = std::max(l_feasible, l);
        }
    }
    if (candidates.empty()) {
        fail_argument("select_order_aic: series of length " + std::to_string(n) +
                      " is too short for every candidate order");
    }
    const std::size_t start = std::max(k_feasible, l_feasible == 0 ? 0 : detail::long_ar_order(n) + l_feasible);
    std::vector<double> innovations;
    if (l_feasible > 0) innovations = detail::long_ar_innovations(x, detail::long_ar_order(n));

    std::optional<ArmaOrder> best;
    double best_aic = std::numeric_limits<double>::infinity();
    for (const auto& cand : candidates) {
        double aic = 0.0;
        try {
            aic = detail::fit_arma_from(x, cand.ar, cand.ma, external, start, &innovations).aic();
        } catch (const std::domain_error&) {
            continue;
        }
        if (!best || aic < best_aic - 1e-9) {
            best = cand;
            best_aic = aic;
        }
    }
    if (!best) fail_undefined("select_order_aic: no candidate order could be fitted");
    return *best;
}

namespace detail {

struct OneStepModel {
    ArmaFit fit;

    // Innovation recursion over x[0..upto) under the fitted coefficients.
    [[nodiscard]] std::vector<double> innovations(std::span<const double> x, std::span<const double> external,
                                                  std::size_t upto) const {
        std::vector<double> e(upto, 0.0);
        const std::size_t warm = std::max(fit.ar.size(), fit.ma.size());
        for (std::size_t t = warm; t < upto; ++t) e[t] = x[t] - predict(x, external, e, t);
        return e;
    }

    [[nodiscard]] double predict(std::span<const double> x, std::span<const double> external,
                                 std::span<const double> innov, std::size_t t) const {
        double v = fit.intercept;
        for (std::size_t i = 0; i < fit.ar.size() && i < t; ++i) v += fit.ar[i] * x[t - 1 - i];
        for (std::size_t j = 0; j < fit.ma.size() && j < t; ++j) v += fit.ma[j] * innov[t - 1 - j];
        if (fit.external_coef) v += *fit.external_coef * external[t];
        return v;
    }
};

inline std::size_t split_point(std::size_t n, double split, const char* who) {
    if (!(split > 0.0 && split < 1.0)) fail_argument(std::string(who) + ": split must lie in (0, 1)");
    const auto train = static_cast<std::size_t>(std::floor(split * static_cast<double>(n)));
    if (train < 1 || train >= n) {
        fail_argument(std::string(who) + ": split leaves an empty training or test segment");
    }
    return train;
}

}  // namespace detail

/// One-step-ahead forecasts over the test segment. The model is refitted on
/// all data observed so far every `refit_every` steps (1 refits before every
/// prediction). Predictions are clamped at zero.
[[nodiscard]] inline ForecastRun rolling_forecast(std::span<const double> x, double split, ArmaOrder order,
                                                  std::size_t refit_every = 1,
                                                  std::span<const double> external = {}) {
    detail::check_external(x, external, "rolling_forecast");
    if (refit_every < 1) fail_argument("rolling_forecast: refit_every must be >= 1");
    const std::size_t n = x.size();
    const std::size_t train = detail::split_point(n, split, "rolling_forecast");

    ForecastRun run;
    run.train_length = train;
    run.horizon = n - train;
    detail::OneStepModel model;
    std::vector<double> innov;
    for (std::size_t t = train; t < n; ++t) {
        if ((t - train) % refit_every == 0) {
            const auto ext_hist = external.empty() ? external : external.first(t);
            try {
                model.fit = fit_arma(x.first(t), order.ar, order.ma, ext_hist);
                ++run.refits;
            } catch (const std::domain_error&) {
                // A later refit that fails (singular or non-invertible) keeps
                // the previous coefficients; the first fit must succeed.
                if (t == train) throw;
                ++run.failed_refits;
            }
            innov = model.innovations(x, external, t);
        }
        const double raw = model.predict(x, external, innov, t);
        const double pred = std::max(raw, 0.0);
        innov.push_back(x[t] - raw);
        run.predictions.push_back(pred);
        run.actuals.push_back(x[t]);
        run.residuals.push_back(x[t] - pred);
    }
    run.model = model.fit;
    return run;
}

/// Forecasts a thinned series with a model trained on the unthinned ground
/// truth: each prediction is rate * (one-step forecast of X), scored against
/// the observed series.
[[nodiscard]] inline ForecastRun ground_truth_forecast(std::span<const double> ground,
                                                       std::span<const double> observed, double rate,
                                                       double split, ArmaOrder order,
                                                       std::size_t refit_every = 1) {
    if (ground.size() != observed.size()) fail_argument("ground_truth_forecast: length mismatch");
    auto run = rolling_forecast(ground, split, order, refit_every);
    for (std::size_t i = 0; i < run.horizon; ++i) {
        const std::size_t t = run.train_length + i;
        run.predictions[i] = rate * run.predictions[i];
        run.actuals[i] = observed[t];
        run.residuals[i] = observed[t] - run.predictions[i];
    }
    return run;
}

/// Expanding-window mean of all preceding values.
[[nodiscard]] inline ForecastRun poisson_forecast(std::span<const double> x, double split) {
    const std::size_t n = x.size();
    const std::size_t train = detail::split_point(n, split, "poisson_forecast");
    ForecastRun run;
    run.train_length = train;
    run.horizon = n - train;
    double sum = 0.0;
    for (std::size_t t = 0; t < train; ++t) sum += x[t];
    for (std::size_t t = train; t < n; ++t) {
        const double pred = sum / static_cast<double>(t);
        run.predictions.push_back(pred);
        run.actuals.push_back(x[t]);
        run.residuals.push_back(x[t] - pred);
        sum += x[t];
    }
    run.model = PoissonRate{sum / static_cast<double>(n)};
    return run;
}

/// RMSE divided by the mean of the actuals.
[[nodiscard]] inline double nrmse(const ForecastRun& run) {
    if (run.actuals.empty() || run.actuals.size() != run.predictions.size()) {
        fail_argument("nrmse: predictions and actuals must be non-empty and of equal length");
    }
    double mean = 0.0;
    double sq = 0.0;
    for (std::size_t i = 0; i < run.actuals.size(); ++i) {
        mean += run.actuals[i];
        const double d = run.actuals[i] - run.predictions[i];
        sq += d * d;
    }
    const auto T = static_cast<double>(run.actuals.size());
    mean /= T;
    if (!(mean > 0.0)) fail_undefined("nrmse: mean of actuals must be positive");
    return std::sqrt(sq / T) / mean;
}

/// CSV with columns step,actual,predicted,residual; step is the absolute
/// time index.
inline void write_forecast_csv(const ForecastRun& run, std::ostream& out) {
    out << "step,actual,predicted,residual\n";
    for (std::size_t i = 0; i < run.horizon; ++i) {
        out << run.train_length + i << ',' << format_number(run.actuals[i]) << ','
            << format_number(run.predictions[i]) << ',' << format_number(run.residuals[i]) << '\n';
    }
}

}  // namespace thinpred
