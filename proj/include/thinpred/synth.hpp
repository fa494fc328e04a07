#pragma once

// Synthetic ARMA generation (d = 0 throughout).
//
// Sign convention: X_t = sum_i phi_i X_{t-i} + e_t + sum_j theta_j e_{t-j}.
// A model written as X_t + sum_i a_i X_{t-i} = e_t + sum_j b_j e_{t-j}
// maps to phi = -a and theta = b. Stationarity and invertibility require
// every root of 1 - phi_1 z - ... - phi_k z^k and 1 + theta_1 z + ... +
// theta_l z^l to lie strictly outside the unit disk.
//
// Random streams: std::mt19937_64 driving boost::random::normal_distribution
// (innovations) and boost::random::uniform_real_distribution (root draws).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>
#include <nlohmann/json.hpp>

#include "thinpred/errors.hpp"
#include "thinpred/linalg.hpp"
#include "thinpred/sampling.hpp"
#include "thinpred/series.hpp"

namespace thinpred {

class ArimaModel {
public:
    ArimaModel() = default;

    ArimaModel(std::vector<double> ar, std::vector<double> ma, double noise_std, double intercept = 0.0,
               bool coupled = false)
        : ar_(std::move(ar)), ma_(std::move(ma)), noise_std_(noise_std), intercept_(intercept),
          coupled_(coupled) {
        if (!(noise_std_ >= 0.0) || !std::isfinite(noise_std_)) {
            fail_argument("ArimaModel: noise_std must be finite and >= 0");
        }
        if (!(intercept_ >= 0.0) || !std::isfinite(intercept_)) {
            fail_argument("ArimaModel: intercept must be finite and >= 0");
        }
        std::vector<double> alpha(ar_.size());
        for (std::size_t i = 0; i < ar_.size(); ++i) alpha[i] = -ar_[i];
        if (!roots_outside_unit_disk(alpha)) {
            fail_argument("ArimaModel: AR polynomial has a root on or inside the unit disk (non-stationary)");
        }
        if (!roots_outside_unit_disk(ma_)) {
            fail_argument("ArimaModel: MA polynomial has a root on or inside the unit disk (non-invertible)");
        }
    }

    [[nodiscard]] const std::vector<double>& ar() const noexcept { return ar_; }
    [[nodiscard]] const std::vector<double>& ma() const noexcept { return ma_; }
    [[nodiscard]] std::size_t ar_order() const noexcept { return ar_.size(); }
    [[nodiscard]] std::size_t ma_order() const noexcept { return ma_.size(); }
    [[nodiscard]] double noise_std() const noexcept { return noise_std_; }
    /// Level added to the zero-mean recursion output.
    [[nodiscard]] double intercept() const noexcept { return intercept_; }
    /// When set, an external series enters every step with unit weight.
    [[nodiscard]] bool coupled() const noexcept { return coupled_; }

    friend bool operator==(const ArimaModel&, const ArimaModel&) = default;

private:
    std::vector<double> ar_;
    std::vector<double> ma_;
    double noise_std_ = 1.0;
    double intercept_ = 0.0;
    bool coupled_ = false;
};

/// 10 * max(k, l, 1) * 20 steps.
[[nodiscard]] inline std::size_t default_burn_in(const ArimaModel& m) {
    return 10 * std::max<std::size_t>({m.ar_order(), m.ma_order(), 1}) * 20;
}

/// Coefficients (c_1..c_k) of prod_i (1 - z / r_i) for roots closed under
/// conjugation; imaginary parts of the product are discarded.
[[nodiscard]] inline std::vector<double> poly_from_roots(std::span<const std::complex<double>> roots) {
    std::vector<std::complex<double>> poly{1.0};
    for (const auto& r : roots) {
        std::vector<std::complex<double>> next(poly.size() + 1, 0.0);
        for (std::size_t i = 0; i < poly.size(); ++i) {
            next[i] += poly[i];
            next[i + 1] -= poly[i] / r;
        }
        poly.swap(next);
    }
    std::vector<double> c;
    c.reserve(poly.size() - 1);
    for (std::size_t i = 1; i < poly.size(); ++i) c.push_back(poly[i].real());
    return c;
}

/// Random polynomial 1 + c_1 z + ... + c_k z^k with every root modulus drawn
/// uniformly from [min_modulus, max_modulus]. Roots come in conjugate pairs
/// with uniform phase in (0, pi); odd orders add one real root of random sign.
[[nodiscard]] inline std::vector<double> random_stationary_poly(std::size_t order, std::uint64_t seed,
                                                                double min_modulus = 1.1,
                                                                double max_modulus = 2.0) {
    if (!(min_modulus > 1.0) || !(max_modulus >= min_modulus)) {
        fail_argument("random_stationary_poly: need 1 < min_modulus <= max_modulus");
    }
    if (order == 0) return {};
    Engine engine(seed);
    boost::random::uniform_real_distribution<double> modulus(min_modulus, max_modulus);
    boost::random::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::complex<double>> roots;
    roots.reserve(order);
    for (std::size_t i = 0; i + 1 < order; i += 2) {
        const double m = modulus(engine);
        const double phase = std::numbers::pi * unit(engine);
        const auto r = std::polar(m, phase);
        roots.push_back(r);
        roots.push_back(std::conj(r));
    }
    if (order % 2 == 1) {
        const double m = modulus(engine);
        roots.emplace_back(unit(engine) < 0.5 ? -m : m, 0.0);
    }
    auto c = poly_from_roots(roots);
    if (!roots_outside_unit_disk(c)) {
        fail_undefined("random_stationary_poly: expanded polynomial failed the root check");
    }
    return c;
}

/// Converts a drawn 1 + c_1 z + ... polynomial into AR coefficients (phi = -c).
[[nodiscard]] inline std::vector<double> ar_from_poly(std::span<const double> c) {
    std::vector<double> phi(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) phi[i] = -c[i];
    return phi;
}

/// Real-valued ARMA path of `length` points after discarding `burn_in`.
/// The recursion starts from zeros. For a coupled model, `external` supplies
/// one value per generated step (burn_in + length) and is added to X_t.
[[nodiscard]] inline std::vector<double> generate_arima(const ArimaModel& model, std::size_t length,
                                                        std::size_t burn_in, std::uint64_t seed,
                                                        std::span<const double> external = {}) {
    if (length < 1) fail_argument("generate_arima: length must be >= 1");
    const std::size_t total = burn_in + length;
    if (model.coupled() && external.size() < total) {
        fail_argument("generate_arima: coupled model needs an external series of length " +
                      std::to_string(total));
    }
    const auto& phi = model.ar();
    const auto& theta = model.ma();
    Engine engine(seed);
    boost::random::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> y(total, 0.0);
    std::vector<double> e(total, 0.0);
    for (std::size_t t = 0; t < total; ++t) {
        e[t] = model.noise_std() * normal(engine);
        double v = e[t];
        for (std::size_t i = 0; i < phi.size() && i < t; ++i) v += phi[i] * y[t - 1 - i];
        for (std::size_t j = 0; j < theta.size() && j < t; ++j) v += theta[j] * e[t - 1 - j];
        if (model.coupled()) v += external[t];
        y[t] = v;
    }
    std::vector<double> out(y.begin() + static_cast<std::ptrdiff_t>(burn_in), y.end());
    for (double& v : out) v += model.intercept();
    return out;
}

struct CountConversion {
    std::vector<double> values;
    double shift = 0.0;
    std::size_t clipped = 0;
};

/// Lifts a real path to non-negative counts: adds
///   shift = max(0, margin_sds * sd(x) - mean(x))
/// so the mean sits at least margin_sds population standard deviations above
/// zero, then clips any remaining negatives to 0. More than 0.1% clipped
/// points is an error. The constant shift leaves every covariance unchanged.
[[nodiscard]] inline CountConversion to_counts(std::span<const double> x, double margin_sds = 6.0) {
    if (!(margin_sds >= 0.0)) fail_argument("to_counts: margin_sds must be >= 0");
    const auto m = moments(x);
    CountConversion out;
    out.shift = std::max(0.0, margin_sds * std::sqrt(m.variance) - m.mean);
    out.values.resize(x.size());
    for (std::size_t t = 0; t < x.size(); ++t) {
        double v = x[t] + out.shift;
        if (v < 0.0) {
            v = 0.0;
            ++out.clipped;
        }
        out.values[t] = v;
    }
    if (static_cast<double>(out.clipped) > 0.001 * static_cast<double>(x.size())) {
        fail_undefined("to_counts: " + std::to_string(out.clipped) + " of " + std::to_string(x.size()) +
                       " points clipped to zero (limit 0.1%)");
    }
    return out;
}

struct PairSpec {
    ArimaModel external;
    ArimaModel ground;
    std::size_t length = 365;
    std::size_t burn_in = 0;
    std::uint64_t seed = 0;
    double margin_sds = 6.0;
};

struct CoupledPair {
    CountSeries external;  // S, shifted to non-negative values
    CountSeries ground;    // X, shifted to non-negative counts
    std::vector<double> external_raw;
    std::vector<double> ground_raw;
    double external_shift = 0.0;
    double ground_shift = 0.0;
    std::size_t clipped = 0;
};

/// Stream seeds used by generate_coupled_pair.
[[nodiscard]] constexpr std::uint64_t external_stream_seed(std::uint64_t seed) noexcept { return mix64(seed); }
[[nodiscard]] constexpr std::uint64_t ground_stream_seed(std::uint64_t seed) noexcept {
    return mix64(mix64(seed));
}

/// S first (over burn_in + length steps, after its own default burn-in), then
/// X with S_t added at every step; both lose the first burn_in points and are
/// lifted to counts with to_counts().
[[nodiscard]] inline CoupledPair generate_coupled_pair(const ArimaModel& external, const ArimaModel& ground,
                                                       std::size_t length, std::size_t burn_in,
                                                       std::uint64_t seed, double margin_sds = 6.0) {
    if (!ground.coupled()) fail_argument("generate_coupled_pair: ground model must have coupling enabled");
    if (external.coupled()) fail_argument("generate_coupled_pair: external model cannot itself be coupled");
    const std::size_t total = burn_in + length;
    const auto s_full = generate_arima(external, total, default_burn_in(external), external_stream_seed(seed));
    auto x_raw = generate_arima(ground, length, burn_in, ground_stream_seed(seed), s_full);
    std::vector<double> s_raw(s_full.begin() + static_cast<std::ptrdiff_t>(burn_in), s_full.end());

    auto s_counts = to_counts(s_raw, margin_sds);
    auto x_counts = to_counts(x_raw, margin_sds);
    CoupledPair pair;
    pair.external = CountSeries(std::move(s_counts.values), "external");
    pair.ground = CountSeries(std::move(x_counts.values), "ground");
    pair.external_raw = std::move(s_raw);
    pair.ground_raw = std::move(x_raw);
    pair.external_shift = s_counts.shift;
    pair.ground_shift = x_counts.shift;
    pair.clipped = x_counts.clipped + s_counts.clipped;
    return pair;
}

[[nodiscard]] inline CoupledPair generate_coupled_pair(const PairSpec& spec) {
    return generate_coupled_pair(spec.external, spec.ground, spec.length, spec.burn_in, spec.seed,
                                 spec.margin_sds);
}

// JSON -----------------------------------------------------------------------

[[nodiscard]] inline nlohmann::json to_json(const ArimaModel& m) {
    return nlohmann::json{{"ar", m.ar()},
                          {"ma", m.ma()},
                          {"noise_std", m.noise_std()},
                          {"intercept", m.intercept()},
                          {"coupled", m.coupled()}};
}

[[nodiscard]] inline ArimaModel arima_from_json(const nlohmann::json& j) {
    try {
        return ArimaModel(j.value("ar", std::vector<double>{}), j.value("ma", std::vector<double>{}),
                          j.value("noise_std", 1.0), j.value("intercept", 0.0), j.value("coupled", false));
    } catch (const nlohmann::json::exception& e) {
        fail_argument(std::string("ArimaModel JSON: ") + e.what());
    }
}

[[nodiscard]] inline nlohmann::json to_json(const PairSpec& s) {
    return nlohmann::json{{"external", to_json(s.external)}, {"ground", to_json(s.ground)},
                          {"length", s.length},             {"burn_in", s.burn_in},
                          {"seed", s.seed},                 {"margin_sds", s.margin_sds}};
}

[[nodiscard]] inline PairSpec pair_spec_from_json(const nlohmann::json& j) {
    try {
        PairSpec s;
        s.external = arima_from_json(j.at("external"));
        s.ground = arima_from_json(j.at("ground"));
        s.length = j.value("length", std::size_t{365});
        s.burn_in = j.value("burn_in", default_burn_in(s.ground));
        s.seed = j.value("seed", std::uint64_t{0});
        s.margin_sds = j.value("margin_sds", 6.0);
        if (s.length < 1) fail_argument("pair spec: length must be >= 1");
        return s;
    } catch (const nlohmann::json::exception& e) {
        fail_argument(std::string("pair spec JSON: ") + e.what());
    }
}

/// A pair with the default orders, external (3,0,2) and ground (5,0,1),
/// whose polynomials are drawn by random_stationary_poly from `poly_seed`.
[[nodiscard]] inline PairSpec random_pair_spec(std::uint64_t poly_seed, std::uint64_t gen_seed,
                                               std::size_t length = 365, double external_noise = 1.0,
                                               double ground_noise = 1.0) {
    PairSpec s;
    s.external = ArimaModel(ar_from_poly(random_stationary_poly(3, mix64(poly_seed ^ 1))),
                            random_stationary_poly(2, mix64(poly_seed ^ 2)), external_noise);
    s.ground = ArimaModel(ar_from_poly(random_stationary_poly(5, mix64(poly_seed ^ 3))),
                          random_stationary_poly(1, mix64(poly_seed ^ 4)), ground_noise, 0.0, true);
    s.length = length;
    s.burn_in = default_burn_in(s.ground);
    s.seed = gen_seed;
    return s;
}

}  // namespace thinpred
