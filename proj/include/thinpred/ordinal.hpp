#pragma once

// Weighted permutation entropy (WPE).
//
// A window [x_t, x_{t+tau}, ..., x_{t+(d-1)tau}] is mapped to the permutation
// of its indices sorted by ascending value (equal values keep their original
// order). Each window adds its own variance, (1/d) * sum (x_j - mean)^2, to
// the bin of its pattern; bins are normalised by the total weight.
//
// Two normalisations coexist on purpose:
//   weighted_permutation_entropy  divides by log2(d!)            (reported)
//   ordinal_search_objective      divides by log2(#observed)     (grid search)
// Without the second one the entropy falls with d and the search would
// always pick the largest order.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "thinpred/errors.hpp"
#include "thinpred/series.hpp"

namespace thinpred {

inline constexpr int kMaxOrdinalOrder = 8;

struct OrdinalConfig {
    int order = 3;
    int delay = 1;

    void validate() const {
        if (order < 2 || order > kMaxOrdinalOrder) {
            fail_argument("OrdinalConfig: order must lie in [2, 8], got " + std::to_string(order));
        }
        if (delay < 1) {
            fail_argument("OrdinalConfig: delay must be >= 1, got " + std::to_string(delay));
        }
    }

    friend bool operator==(const OrdinalConfig&, const OrdinalConfig&) = default;
};

struct OrdinalDistribution {
    int order = 0;
    int delay = 0;
    std::vector<double> weights;  // indexed by lexicographic permutation rank, size d!
    std::size_t window_count = 0;
    bool degenerate = false;  // every window had zero weight (constant series)

    [[nodiscard]] std::size_t observed_patterns() const {
        return static_cast<std::size_t>(
            std::count_if(weights.begin(), weights.end(), [](double w) { return w > 0.0; }));
    }
};

[[nodiscard]] constexpr std::size_t factorial(int d) noexcept {
    std::size_t f = 1;
    for (int i = 2; i <= d; ++i) f *= static_cast<std::size_t>(i);
    return f;
}

/// Lexicographic rank of a permutation of {0, ..., d-1} (Lehmer code).
[[nodiscard]] inline std::size_t permutation_rank(std::span<const int> perm) {
    const std::size_t d = perm.size();
    std::size_t rank = 0;
    for (std::size_t i = 0; i < d; ++i) {
        std::size_t smaller = 0;
        for (std::size_t j = i + 1; j < d; ++j) {
            if (perm[j] < perm[i]) ++smaller;
        }
        rank += smaller * factorial(static_cast<int>(d - 1 - i));
    }
    return rank;
}

/// Inverse of permutation_rank; returns 0-based indices.
[[nodiscard]] inline std::vector<int> permutation_from_rank(std::size_t rank, int order) {
    std::vector<int> pool(static_cast<std::size_t>(order));
    std::iota(pool.begin(), pool.end(), 0);
    std::vector<int> perm;
    perm.reserve(pool.size());
    for (int i = order - 1; i >= 0; --i) {
        const std::size_t f = factorial(i);
        const std::size_t k = rank / f;
        rank %= f;
        perm.push_back(pool[k]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(k));
    }
    return perm;
}

namespace detail {

// Insertion sort of indices by value; stable, so ties keep index order.
inline std::size_t pattern_of(const double* x, std::size_t stride, int d) {
    int idx[kMaxOrdinalOrder];
    for (int i = 0; i < d; ++i) {
        int j = i;
        const double v = x[static_cast<std::size_t>(i) * stride];
        while (j > 0 && x[static_cast<std::size_t>(idx[j - 1]) * stride] > v) {
            idx[j] = idx[j - 1];
            --j;
        }
        idx[j] = i;
    }
    return permutation_rank(std::span<const int>(idx, static_cast<std::size_t>(d)));
}

inline std::size_t window_count_for(std::size_t n, const OrdinalConfig& cfg) {
    const auto span_len = static_cast<std::size_t>(cfg.order - 1) * static_cast<std::size_t>(cfg.delay);
    return n > span_len ? n - span_len : 0;
}

inline double entropy_bits(std::span<const double> p) {
    double h = 0.0;
    for (double q : p) {
        if (q > 0.0) h -= q * std::log2(q);
    }
    return std::max(h, 0.0);
}

}  // namespace detail

/// Ordinal pattern of a window of length `order`, as a permutation rank.
/// [3, 6, 1] sorts to indices (2, 0, 1), i.e. pattern (3 1 2) in 1-based form.
[[nodiscard]] inline std::size_t ordinal_pattern(std::span<const double> window, int order) {
    if (order < 2 || order > kMaxOrdinalOrder) {
        fail_argument("ordinal_pattern: order must lie in [2, 8]");
    }
    if (window.size() != static_cast<std::size_t>(order)) {
        fail_argument("ordinal_pattern: window length " + std::to_string(window.size()) +
                      " does not match order " + std::to_string(order));
    }
    return detail::pattern_of(window.data(), 1, order);
}

[[nodiscard]] inline OrdinalDistribution weighted_pattern_distribution(std::span<const double> x,
                                                                       const OrdinalConfig& cfg) {
    cfg.validate();
    const std::size_t windows = detail::window_count_for(x.size(), cfg);
    if (windows == 0) {
        fail_argument("weighted_pattern_distribution: series of length " +
                      std::to_string(x.size()) + " is too short for order " +
                      std::to_string(cfg.order) + " and delay " + std::to_string(cfg.delay));
    }
    OrdinalDistribution dist;
    dist.order = cfg.order;
    dist.delay = cfg.delay;
    dist.window_count = windows;
    dist.weights.assign(factorial(cfg.order), 0.0);

    const auto stride = static_cast<std::size_t>(cfg.delay);
    const double inv_d = 1.0 / cfg.order;
    double total = 0.0;
    for (std::size_t t = 0; t < windows; ++t) {
        const double* w = x.data() + t;
        double mean = 0.0;
        for (int j = 0; j < cfg.order; ++j) mean += w[static_cast<std::size_t>(j) * stride];
        mean *= inv_d;
        double var = 0.0;
        for (int j = 0; j < cfg.order; ++j) {
            const double dev = w[static_cast<std::size_t>(j) * stride] - mean;
            var += dev * dev;
        }
        var *= inv_d;
        if (var <= 0.0) continue;
        dist.weights[detail::pattern_of(w, stride, cfg.order)] += var;
        total += var;
    }
    if (total <= 0.0) {
        dist.degenerate = true;
        std::fill(dist.weights.begin(), dist.weights.end(), 0.0);
        return dist;
    }
    for (double& v : dist.weights) v /= total;
    return dist;
}

/// WPE normalised by log2(d!), in [0, 1]. A constant series scores 0.
[[nodiscard]] inline double weighted_permutation_entropy(std::span<const double> x,
                                                         const OrdinalConfig& cfg) {
    const auto dist = weighted_pattern_distribution(x, cfg);
    if (dist.degenerate) return 0.0;
    const double h = detail::entropy_bits(dist.weights);
    return std::clamp(h / std::log2(static_cast<double>(factorial(cfg.order))), 0.0, 1.0);
}

/// Unweighted Bandt-Pompe entropy normalised by log2(d!). Diagnostic only.
[[nodiscard]] inline double permutation_entropy(std::span<const double> x, const OrdinalConfig& cfg) {
    cfg.validate();
    const std::size_t windows = detail::window_count_for(x.size(), cfg);
    if (windows == 0) fail_argument("permutation_entropy: series too short");
    std::vector<double> freq(factorial(cfg.order), 0.0);
    for (std::size_t t = 0; t < windows; ++t) {
        freq[detail::pattern_of(x.data() + t, static_cast<std::size_t>(cfg.delay), cfg.order)] += 1.0;
    }
    for (double& f : freq) f /= static_cast<double>(windows);
    return detail::entropy_bits(freq) / std::log2(static_cast<double>(factorial(cfg.order)));
}

/// Grid-search objective: weighted entropy over log2(number of patterns with
/// non-zero weight). Zero when at most one pattern carries weight.
[[nodiscard]] inline double ordinal_search_objective(std::span<const double> x,
                                                     const OrdinalConfig& cfg) {
    const auto dist = weighted_pattern_distribution(x, cfg);
    const std::size_t observed = dist.observed_patterns();
    if (dist.degenerate || observed <= 1) return 0.0;
    return std::clamp(detail::entropy_bits(dist.weights) / std::log2(static_cast<double>(observed)),
                      0.0, 1.0);
}

struct OrdinalSearchRange {
    int order_min = 2;
    int order_max = 5;
    int delay_min = 1;
    int delay_max = 7;
};

/// True when (order, delay) yields at least two windows, the minimum for a
/// meaningful comparison in the grid search.
[[nodiscard]] inline bool ordinal_search_feasible(std::size_t n, const OrdinalConfig& cfg) {
    return detail::window_count_for(n, cfg) >= 2;
}

/// Minimises ordinal_search_objective over the grid; infeasible cells are
/// skipped, ties go to the smaller order and then the smaller delay.
[[nodiscard]] inline OrdinalConfig select_ordinal_params(std::span<const double> x,
                                                         const OrdinalSearchRange& range = {}) {
    if (range.order_min < 2 || range.order_max > kMaxOrdinalOrder ||
        range.order_min > range.order_max || range.delay_min < 1 ||
        range.delay_min > range.delay_max) {
        fail_argument("select_ordinal_params: invalid search range");
    }
    bool found = false;
    OrdinalConfig best;
    double best_obj = 0.0;
    for (int d = range.order_min; d <= range.order_max; ++d) {
        for (int tau = range.delay_min; tau <= range.delay_max; ++tau) {
            const OrdinalConfig cfg{d, tau};
            if (!ordinal_search_feasible(x.size(), cfg)) continue;
            const double obj = ordinal_search_objective(x, cfg);
            if (!found || obj < best_obj - 1e-12) {
                found = true;
                best = cfg;
                best_obj = obj;
            }
        }
    }
    if (!found) {
        fail_argument("select_ordinal_params: no feasible (order, delay) pair for a series of length " +
                      std::to_string(x.size()));
    }
    return best;
}

}  // namespace thinpred
