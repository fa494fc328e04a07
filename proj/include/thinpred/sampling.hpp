#pragma once

// Binomial thinning: every event in a count is kept independently with
// probability p. Fractional counts x = m + f are split into m whole events,
// thinned binomially, plus the fractional remainder, which is kept whole
// with probability p.
//
// Reproducibility contract
//   engine:   std::mt19937_64 seeded with a single 64-bit value
//   binomial: boost::random::binomial_distribution<std::int64_t> (BTRD)
//   keep f:   boost::random::bernoulli_distribution<double>
//   seeds:    stable_mix(base_seed, replicate, rate), defined below
// Draw order per entry: the binomial draw for m (skipped when m == 0), then
// the Bernoulli draw for f (skipped when f == 0).

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <boost/random/bernoulli_distribution.hpp>
#include <boost/random/binomial_distribution.hpp>

#include "thinpred/errors.hpp"
#include "thinpred/series.hpp"

namespace thinpred {

using Engine = std::mt19937_64;

/// SplitMix64 finaliser.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed for replicate `replicate` of a sweep at sampling rate `rate`:
///   mix64(mix64(mix64(base_seed) ^ replicate) ^ bits(rate))
/// where bits() is the IEEE-754 binary64 pattern of the rate.
[[nodiscard]] constexpr std::uint64_t stable_mix(std::uint64_t base_seed, std::uint64_t replicate,
                                                 double rate) noexcept {
    return mix64(mix64(mix64(base_seed) ^ replicate) ^ std::bit_cast<std::uint64_t>(rate));
}

inline void check_rate(double rate) {
    if (!(rate >= 0.0 && rate <= 1.0)) {
        fail_argument("sampling rate must lie in [0, 1], got " + std::to_string(rate));
    }
}

struct SamplingPlan {
    double rate = 1.0;
    std::size_t replicates = 1;
    std::uint64_t base_seed = 0;

    void validate() const {
        check_rate(rate);
        if (replicates < 1) fail_argument("SamplingPlan: replicates must be >= 1");
    }
};

[[nodiscard]] inline CountSeries binomial_thin(const CountSeries& series, double rate,
                                               std::uint64_t seed) {
    check_rate(rate);
    std::vector<double> out(series.size(), 0.0);
    if (rate == 1.0) {
        return CountSeries(series.data(), series.label());
    }
    if (rate == 0.0) {
        return CountSeries(std::move(out), series.label());
    }
    Engine engine(seed);
    boost::random::bernoulli_distribution<double> keep_fraction(rate);
    // BTRD setup is not free; reuse it while the integer part repeats.
    using Binomial = boost::random::binomial_distribution<std::int64_t, double>;
    Binomial draw(0, rate);
    for (std::size_t t = 0; t < series.size(); ++t) {
        const double x = series[t];
        const double whole = std::floor(x);
        const double frac = x - whole;
        double y = 0.0;
        if (whole > 0.0) {
            const auto trials = static_cast<std::int64_t>(whole);
            if (draw.t() != trials) draw = Binomial(trials, rate);
            y = static_cast<double>(draw(engine));
        }
        if (frac > 0.0 && keep_fraction(engine)) {
            y += frac;
        }
        out[t] = y;
    }
    return CountSeries(std::move(out), series.label());
}

[[nodiscard]] inline std::vector<CountSeries> replicate_thin(const CountSeries& series,
                                                             const SamplingPlan& plan) {
    plan.validate();
    std::vector<CountSeries> out;
    out.reserve(plan.replicates);
    for (std::size_t i = 0; i < plan.replicates; ++i) {
        out.push_back(binomial_thin(series, plan.rate, stable_mix(plan.base_seed, i, plan.rate)));
    }
    return out;
}

}  // namespace thinpred
