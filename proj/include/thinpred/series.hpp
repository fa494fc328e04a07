#pragma once

// Count-series container and the moment / correlation estimators used by
// every other module.
//
// Moment convention: population moments everywhere (divide by n, not n-1).
// Plugging these estimates into the thinning covariance law then stays
// internally consistent. Lagged statistics use the overlapping window only;
// there is no padding and no circular wrap.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "thinpred/errors.hpp"

namespace thinpred {

/// Ordered non-negative event counts on a uniform time grid (index is time).
/// Fractional counts are allowed; synthetic ARIMA output is real-valued.
class CountSeries {
public:
    CountSeries() = default;

    explicit CountSeries(std::vector<double> values, std::string label = {})
        : values_(std::move(values)), label_(std::move(label)) {
        if (values_.empty()) {
            fail_argument("CountSeries: series must contain at least one value");
        }
        for (std::size_t i = 0; i < values_.size(); ++i) {
            const double v = values_[i];
            if (!std::isfinite(v) || v < 0.0) {
                fail_argument("CountSeries: value at index " + std::to_string(i) +
                              " is negative or not finite");
            }
        }
    }

    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] const std::vector<double>& data() const noexcept { return values_; }
    [[nodiscard]] const std::string& label() const noexcept { return label_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }

    // Lets every span-based estimator accept a CountSeries directly.
    operator std::span<const double>() const noexcept { return values_; }  // NOLINT

    friend bool operator==(const CountSeries&, const CountSeries&) = default;

private:
    std::vector<double> values_;
    std::string label_;
};

struct Moments {
    double mean = 0.0;
    double variance = 0.0;  // population convention
    std::size_t count = 0;
};

namespace detail {

// Pairwise summation split at the midpoint. Summing a sequence concatenated
// with itself yields exactly twice the sum of the sequence.
inline double pairwise_sum(std::span<const double> x) {
    if (x.size() == 1) return x[0];
    if (x.size() == 2) return x[0] + x[1];
    const std::size_t mid = x.size() / 2;
    return pairwise_sum(x.first(mid)) + pairwise_sum(x.subspan(mid));
}

}  // namespace detail

[[nodiscard]] inline Moments moments(std::span<const double> x) {
    if (x.empty()) {
        fail_argument("moments: empty series");
    }
    const auto n = static_cast<double>(x.size());
    const double mean = detail::pairwise_sum(x) / n;
    std::vector<double> sq(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) sq[i] = (x[i] - mean) * (x[i] - mean);
    return {mean, detail::pairwise_sum(sq) / n, x.size()};
}

namespace detail {

// Sum of products of deviations over a[0..m) and b[0..m), each centred on
// its own mean. Symmetric in its arguments bit-for-bit.
inline double centred_cross_sum(std::span<const double> a, std::span<const double> b) {
    const std::size_t m = a.size();
    double sa = 0.0;
    double sb = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sa += a[i];
        sb += b[i];
    }
    const double ma = sa / static_cast<double>(m);
    const double mb = sb / static_cast<double>(m);
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += (a[i] - ma) * (b[i] - mb);
    return s;
}

inline void check_lagged(std::size_t na, std::size_t nb, std::size_t lag, const char* who) {
    if (na != nb) {
        fail_argument(std::string(who) + ": length mismatch (" + std::to_string(na) + " vs " +
                      std::to_string(nb) + ")");
    }
    if (lag >= na || na - lag < 2) {
        fail_argument(std::string(who) + ": lag " + std::to_string(lag) +
                      " leaves fewer than 2 overlapping points");
    }
}

}  // namespace detail

/// Population covariance of (a_t, b_{t+lag}) over the overlapping window.
[[nodiscard]] inline double cross_covariance(std::span<const double> a, std::span<const double> b,
                                             std::size_t lag) {
    detail::check_lagged(a.size(), b.size(), lag, "cross_covariance");
    const std::size_t m = a.size() - lag;
    return detail::centred_cross_sum(a.first(m), b.subspan(lag, m)) / static_cast<double>(m);
}

namespace detail {

inline double pearson_unchecked(std::span<const double> a, std::span<const double> b) {
    const double sab = centred_cross_sum(a, b);
    const double saa = centred_cross_sum(a, a);
    const double sbb = centred_cross_sum(b, b);
    if (!(saa > 0.0) || !(sbb > 0.0)) {
        fail_undefined("pearson: correlation undefined for a constant series");
    }
    const double r = sab / std::sqrt(saa * sbb);
    return std::clamp(r, -1.0, 1.0);
}

}  // namespace detail

[[nodiscard]] inline double pearson(std::span<const double> a, std::span<const double> b) {
    detail::check_lagged(a.size(), b.size(), 0, "pearson");
    return detail::pearson_unchecked(a, b);
}

/// Pearson correlation of x_t with x_{t+lag} over the overlap.
[[nodiscard]] inline double autocorrelation(std::span<const double> x, std::size_t lag) {
    detail::check_lagged(x.size(), x.size(), lag, "autocorrelation");
    const std::size_t m = x.size() - lag;
    if (lag == 0) {
        // Still reject constant input.
        (void)detail::pearson_unchecked(x, x);
        return 1.0;
    }
    return detail::pearson_unchecked(x.first(m), x.subspan(lag, m));
}

/// Lag in [1, max_lag] maximising |autocorrelation|; ties go to the smaller lag.
/// Magnitudes within 1e-12 of each other count as ties, so rounding noise
/// cannot pick between e.g. the half period and full period of a sinusoid.
[[nodiscard]] inline std::size_t dominant_lag(std::span<const double> x, std::size_t max_lag) {
    if (max_lag < 1) {
        fail_argument("dominant_lag: max_lag must be >= 1");
    }
    if (x.size() <= max_lag + 1) {
        fail_argument("dominant_lag: series length must exceed max_lag + 1");
    }
    std::size_t best = 1;
    double best_abs = -1.0;
    for (std::size_t lag = 1; lag <= max_lag; ++lag) {
        const double r = std::abs(autocorrelation(x, lag));
        if (r > best_abs + 1e-12) {
            best_abs = r;
            best = lag;
        }
    }
    return best;
}

}  // namespace thinpred
