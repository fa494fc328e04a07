#pragma once

// Histogram (plug-in) mutual information between two series.
//
// Each series is discretised separately into B equal-width bins over
// [min, max]; bins are half-open [lo, hi) except the top bin, which also
// holds the maximum. MI is reported in nats.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "thinpred/errors.hpp"

namespace thinpred {

struct SymbolSeries {
    std::vector<int> symbols;
    int bin_count = 0;
    std::vector<double> bin_edges;  // bin_count + 1 ascending edges
};

/// ceil(sqrt(n)) capped at 32.
[[nodiscard]] inline int default_bin_count(std::size_t n) {
    const auto b = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
    return std::clamp(b, 1, 32);
}

[[nodiscard]] inline double nats_to_bits(double nats) { return nats / std::numbers::ln2; }

[[nodiscard]] inline SymbolSeries discretize(std::span<const double> x, int bins) {
    if (bins < 1) fail_argument("discretize: bins must be >= 1");
    SymbolSeries out;
    out.symbols.assign(x.size(), 0);
    if (x.empty()) {
        out.bin_count = bins;
        out.bin_edges.assign(static_cast<std::size_t>(bins) + 1, 0.0);
        for (int i = 0; i <= bins; ++i) out.bin_edges[static_cast<std::size_t>(i)] = i;
        return out;
    }
    const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (!(hi > lo)) {
        // Constant input: one degenerate bin centred on the value.
        out.bin_count = 1;
        out.bin_edges = {lo - 0.5, lo + 0.5};
        return out;
    }
    out.bin_count = bins;
    const double range = hi - lo;
    out.bin_edges.resize(static_cast<std::size_t>(bins) + 1);
    for (int i = 0; i <= bins; ++i) {
        out.bin_edges[static_cast<std::size_t>(i)] = lo + range * i / bins;
    }
    out.bin_edges.back() = hi;
    for (std::size_t t = 0; t < x.size(); ++t) {
        const auto b = static_cast<int>(std::floor((x[t] - lo) * bins / range));
        out.symbols[t] = std::clamp(b, 0, bins - 1);
    }
    return out;
}

namespace detail {

struct JointCounts {
    std::vector<double> joint;  // row-major [a_bin][b_bin]
    std::vector<double> pa;
    std::vector<double> pb;
    int ba = 0;
    int bb = 0;
};

inline JointCounts joint_histogram(std::span<const double> a, std::span<const double> b, int bins) {
    if (a.size() != b.size()) {
        fail_argument("mutual_information: length mismatch (" + std::to_string(a.size()) + " vs " +
                      std::to_string(b.size()) + ")");
    }
    if (a.size() < 2) fail_argument("mutual_information: need at least 2 points");
    const auto sa = discretize(a, bins);
    const auto sb = discretize(b, bins);
    JointCounts jc;
    jc.ba = sa.bin_count;
    jc.bb = sb.bin_count;
    jc.joint.assign(static_cast<std::size_t>(jc.ba) * static_cast<std::size_t>(jc.bb), 0.0);
    jc.pa.assign(static_cast<std::size_t>(jc.ba), 0.0);
    jc.pb.assign(static_cast<std::size_t>(jc.bb), 0.0);
    const double inv_n = 1.0 / static_cast<double>(a.size());
    for (std::size_t t = 0; t < a.size(); ++t) {
        const auto i = static_cast<std::size_t>(sa.symbols[t]);
        const auto j = static_cast<std::size_t>(sb.symbols[t]);
        jc.joint[i * static_cast<std::size_t>(jc.bb) + j] += inv_n;
        jc.pa[i] += inv_n;
        jc.pb[j] += inv_n;
    }
    return jc;
}

inline double plug_in_mi(const JointCounts& jc) {
    double mi = 0.0;
    for (int i = 0; i < jc.ba; ++i) {
        for (int j = 0; j < jc.bb; ++j) {
            const double pij = jc.joint[static_cast<std::size_t>(i) * static_cast<std::size_t>(jc.bb) +
                                        static_cast<std::size_t>(j)];
            if (pij <= 0.0) continue;
            mi += pij * std::log(pij / (jc.pa[static_cast<std::size_t>(i)] *
                                        jc.pb[static_cast<std::size_t>(j)]));
        }
    }
    return std::max(mi, 0.0);
}

}  // namespace detail

/// Plug-in estimate in nats: sum p(i,j) ln[p(i,j) / (p(i) p(j))].
[[nodiscard]] inline double mutual_information(std::span<const double> a, std::span<const double> b,
                                               int bins) {
    // Arguments are put in a canonical order so that MI(a, b) == MI(b, a)
    // bit-for-bit.
    if (std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end())) {
        return detail::plug_in_mi(detail::joint_histogram(b, a, bins));
    }
    return detail::plug_in_mi(detail::joint_histogram(a, b, bins));
}

/// Plug-in MI plus the Miller-Madow bias correction (occupied-cell form):
/// MI_mm = MI - (K_ab - K_a - K_b + 1) / (2n), K = number of occupied cells.
/// Diagnostic companion to mutual_information; may be slightly negative.
[[nodiscard]] inline double mutual_information_miller_madow(std::span<const double> a,
                                                            std::span<const double> b, int bins) {
    const double mi = mutual_information(a, b, bins);
    const auto jc = detail::joint_histogram(a, b, bins);
    const auto occupied = [](const std::vector<double>& v) {
        return static_cast<double>(std::count_if(v.begin(), v.end(), [](double p) { return p > 0.0; }));
    };
    const double n = static_cast<double>(a.size());
    // Entropy corrections: H += (K - 1) / 2n for each of H(a), H(b), H(a,b);
    // MI = H(a) + H(b) - H(a,b).
    return mi + ((occupied(jc.pa) - 1.0) + (occupied(jc.pb) - 1.0) - (occupied(jc.joint) - 1.0)) /
                    (2.0 * n);
}

}  // namespace thinpred
