#pragma once

// Bundled miniature datasets. Every fixture is regenerated from the
// construction below; the copies under tests/fixtures/ are the same bytes
// written to disk so external tools can read them without the library.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <boost/random/normal_distribution.hpp>
#include <nlohmann/json.hpp>

#include "thinpred/errors.hpp"
#include "thinpred/format.hpp"
#include "thinpred/sampling.hpp"
#include "thinpred/series.hpp"
#include "thinpred/synth.hpp"

namespace thinpred {

struct PinnedValue {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;  // absolute
    std::string provenance;
};

struct Fixture {
    std::string name;
    std::string csv;            // file payload, header row first
    nlohmann::json spec;        // everything needed to rebuild the payload
    std::string provenance;
    std::vector<PinnedValue> pinned;

    [[nodiscard]] const PinnedValue& pin(const std::string& key) const {
        for (const auto& p : pinned) {
            if (p.name == key) return p;
        }
        fail_argument("fixture " + name + ": no pinned value '" + key + "'");
    }
};

namespace fixture_params {

inline constexpr std::size_t kSeasonalWeeks = 52;
inline constexpr std::size_t kSeasonalPeriod = 13;
inline constexpr double kSeasonalBase = 20.0;
inline constexpr double kSeasonalAmplitude = 80.0;
inline constexpr double kSeasonalNoise = 2.0;
inline constexpr std::uint64_t kSeasonalSeed = 20240052;

inline constexpr std::size_t kArchLength = 2000;
inline constexpr double kArchOmega = 0.2;
inline constexpr double kArchAlpha = 0.5;
inline constexpr std::uint64_t kArchSeed = 1983;  // Engle's ARCH paper

}  // namespace fixture_params

/// Outbreak shape on one period: slow rise, sharp decline. u^3 (1 - u)
/// scaled to peak at 1 when u = 3/4.
[[nodiscard]] inline double epidemic_shape(double u) {
    return u * u * u * (1.0 - u) * (256.0 / 27.0);
}

/// Weekly counts: base + amplitude * shape(phase) + N(0, noise), rounded and
/// floored at zero.
[[nodiscard]] inline CountSeries seasonal_series() {
    using namespace fixture_params;
    Engine engine(kSeasonalSeed);
    boost::random::normal_distribution<double> normal(0.0, kSeasonalNoise);
    std::vector<double> v(kSeasonalWeeks);
    for (std::size_t t = 0; t < kSeasonalWeeks; ++t) {
        const double u = static_cast<double>(t % kSeasonalPeriod) / static_cast<double>(kSeasonalPeriod);
        v[t] = std::max(0.0, std::round(kSeasonalBase + kSeasonalAmplitude * epidemic_shape(u) + normal(engine)));
    }
    return CountSeries(std::move(v), "cases");
}

/// e_t = sqrt(omega + alpha e_{t-1}^2) z_t with z_t ~ N(0, 1), e_{-1} = 0.
[[nodiscard]] inline std::vector<double> arch1_trace(std::size_t n = fixture_params::kArchLength,
                                                     double omega = fixture_params::kArchOmega,
                                                     double alpha = fixture_params::kArchAlpha,
                                                     std::uint64_t seed = fixture_params::kArchSeed) {
    Engine engine(seed);
    boost::random::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> e(n);
    double prev = 0.0;
    for (auto& x : e) {
        x = std::sqrt(omega + alpha * prev * prev) * normal(engine);
        prev = x;
    }
    return e;
}

/// Pinned spec of the coupled (S, X) pair. S is AR(1); X is AR(2) driven by S
/// with a level high enough that no shift is needed.
[[nodiscard]] inline PairSpec coupled_fixture_spec() {
    PairSpec s;
    s.external = ArimaModel({0.9}, {}, 2.0);
    s.ground = ArimaModel({1.1, -0.3}, {0.3}, 3.0, 300.0, true);
    s.length = 365;
    s.burn_in = default_burn_in(s.ground);
    s.seed = 7;
    return s;
}

namespace detail {

inline std::string column_csv(const std::vector<std::string>& header,
                              const std::vector<std::vector<double>>& columns, bool index_column) {
    std::ostringstream out;
    if (index_column) out << "t,";
    for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
    out << '\n';
    const std::size_t n = columns.front().size();
    for (std::size_t t = 0; t < n; ++t) {
        if (index_column) out << t << ',';
        for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << format_number(columns[c][t]);
        out << '\n';
    }
    return out.str();
}

}  // namespace detail

[[nodiscard]] inline Fixture seasonal_fixture() {
    using namespace fixture_params;
    Fixture f;
    f.name = "seasonal";
    const auto s = seasonal_series();
    std::ostringstream csv;
    csv << "week,cases\n";
    for (std::size_t t = 0; t < s.size(); ++t) csv << t << ',' << format_number(s[t]) << '\n';
    f.csv = csv.str();
    f.spec = {{"weeks", kSeasonalWeeks},         {"period", kSeasonalPeriod}, {"base", kSeasonalBase},
              {"amplitude", kSeasonalAmplitude}, {"noise_sd", kSeasonalNoise}, {"seed", kSeasonalSeed},
              {"shape", "u^3 (1 - u) * 256/27"}};
    f.provenance = "deterministic construction: periodic outbreak shape plus seeded Gaussian noise, rounded";
    f.pinned = {
        {"dominant_lag_max20", static_cast<double>(kSeasonalPeriod), 0.0,
         "construction period; lags up to 20 exclude the second harmonic at 26"},
        // Mean of the noiseless curve over whole periods is base + amplitude * mean(shape);
        // the noise term shifts it by at most 4 noise sd / sqrt(52).
        {"mean", [] {
             double acc = 0.0;
             for (std::size_t k = 0; k < kSeasonalPeriod; ++k) {
                 acc += epidemic_shape(static_cast<double>(k) / static_cast<double>(kSeasonalPeriod));
             }
             return kSeasonalBase + kSeasonalAmplitude * acc / static_cast<double>(kSeasonalPeriod);
         }(),
         4.0 * kSeasonalNoise / std::sqrt(static_cast<double>(kSeasonalWeeks)) + 0.5,
         "closed-form period average of the construction curve; tolerance covers noise and rounding"},
    };
    return f;
}

[[nodiscard]] inline Fixture coupled_fixture() {
    Fixture f;
    f.name = "coupled";
    const auto spec = coupled_fixture_spec();
    const auto pair = generate_coupled_pair(spec);
    f.csv = detail::column_csv({"external", "ground"}, {pair.external.data(), pair.ground.data()}, true);
    f.spec = to_json(spec);
    f.provenance = "generate_coupled_pair on the embedded pair spec";
    // X = a(B)^-1 (S + e) + c with a(z) = 1 - 1.1 z + 0.3 z^2; a(1) = 0.2.
    const double ar_sum = 1.0 - (1.1 - 0.3);
    f.pinned = {
        {"ground_mean", spec.ground.intercept(), 0.1 * spec.ground.intercept(),
         "stationary mean of the ground model (S enters with zero mean)"},
        {"ground_shift", 0.0, 0.0, "intercept exceeds 6 sd, so to_counts adds nothing"},
        {"ar_unit_gain", 1.0 / ar_sum, 1e-12, "1 / a(1) for the ground AR polynomial"},
    };
    return f;
}

[[nodiscard]] inline Fixture arch_fixture() {
    using namespace fixture_params;
    Fixture f;
    f.name = "arch1";
    const auto e = arch1_trace();
    f.csv = detail::column_csv({"residual"}, {e}, true);
    f.spec = {{"length", kArchLength}, {"omega", kArchOmega}, {"alpha", kArchAlpha}, {"seed", kArchSeed}};
    f.provenance = "ARCH(1) recursion sigma_t^2 = omega + alpha e_{t-1}^2 driven by seeded N(0, 1)";
    f.pinned = {
        {"unconditional_variance", kArchOmega / (1.0 - kArchAlpha), [] {
             // Four standard errors of the mean of e^2: E[e^4] is finite for
             // 3 alpha^2 < 1 and the squares have autocorrelation alpha^k.
             const double w = kArchOmega, a = kArchAlpha;
             const double m2 = w / (1.0 - a);
             const double m4 = 3.0 * w * w * (1.0 + a) / ((1.0 - a) * (1.0 - 3.0 * a * a));
             return 4.0 * std::sqrt((m4 - m2 * m2) * (1.0 + a) / ((1.0 - a) * static_cast<double>(kArchLength)));
         }(),
         "omega / (1 - alpha); tolerance is four standard errors of the sample mean of e^2"},
        {"elm_lag1_rejects", 1.0, 0.0, "ARCH(1) with alpha = 0.5 and n = 2000 is far inside the test's power"},
    };
    return f;
}

[[nodiscard]] inline std::vector<Fixture> fixture_catalog() {
    return {seasonal_fixture(), coupled_fixture(), arch_fixture()};
}

[[nodiscard]] inline nlohmann::json fixture_manifest(const Fixture& f) {
    nlohmann::json pins = nlohmann::json::array();
    for (const auto& p : f.pinned) {
        pins.push_back({{"name", p.name},
                        {"value", round_to_9_digits(p.value)},
                        {"tolerance", round_to_9_digits(p.tolerance)},
                        {"provenance", p.provenance}});
    }
    return {{"name", f.name}, {"provenance", f.provenance}, {"spec", f.spec}, {"pinned", pins}};
}

/// Writes <name>.csv and <name>.json for every fixture into `dir`.
inline void write_fixtures(const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& f : fixture_catalog()) {
        const auto write = [](const std::filesystem::path& p, const std::string& text) {
            std::ofstream out(p, std::ios::binary);
            if (!out) throw std::runtime_error("cannot open " + p.string() + " for writing");
            out << text;
            if (!out) throw std::runtime_error("write failed for " + p.string());
        };
        write(dir / (f.name + ".csv"), f.csv);
        write(dir / (f.name + ".json"), fixture_manifest(f).dump(2) + "\n");
    }
}

}  // namespace thinpred
