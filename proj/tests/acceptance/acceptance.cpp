// Acceptance suite: one PASS/FAIL line per criterion, with wall time against
// the criterion's budget. Exit status is the number of failing criteria
// (capped at 1 for ctest).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "test_support.hpp"
#include "thinpred/thinpred.hpp"

using namespace thinpred;
using thinpred::testing::fixture_dir;
using thinpred::testing::median;
using thinpred::testing::sign_test_p_value;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::vector<double> rate_grid() {
    std::vector<double> r;
    for (int i = 1; i <= 10; ++i) r.push_back(i / 10.0);
    return r;
}

/// AR(1) count path: real AR(1) around `mean`, rounded and floored at zero.
CountSeries ar1_counts(double phi, double sd, double mean, std::size_t n, std::uint64_t seed) {
    const double sigma = sd * std::sqrt(1.0 - phi * phi);
    const auto raw = generate_arima(ArimaModel({phi}, {}, sigma, mean), n, 500, seed);
    std::vector<double> v(raw.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::max(0.0, std::round(raw[i]));
    return CountSeries(std::move(v), "ar1");
}

SweepConfig coupled_sweep(const std::vector<std::string>& metrics, std::size_t replicates,
                          std::vector<double> rates, std::uint64_t seed) {
    SweepConfig cfg;
    const auto path = (fixture_dir() / "coupled.csv").string();
    cfg.source = ColumnSource{path, "ground"};
    cfg.external = ColumnSource{path, "external"};
    cfg.label = "coupled";
    cfg.metrics = metrics;
    cfg.replicates = replicates;
    cfg.rates = std::move(rates);
    cfg.base_seed = seed;
    return cfg;
}

std::map<double, std::vector<double>> by_rate(const SweepResult& res, const std::string& metric) {
    std::map<double, std::vector<double>> out;
    for (const auto& r : res.records) {
        if (r.metric == metric) out[r.rate].push_back(r.empirical);
    }
    return out;
}

// 1 -------------------------------------------------------------------------
Outcome variance_law() {
    const CountSeries x(std::vector<double>(200, 100.0));
    const std::size_t R = 100000;
    double worst = 0.0;
    for (int k = 1; k <= 9; ++k) {
        const double p = k / 10.0;
        std::vector<double> sum(x.size(), 0.0), sq(x.size(), 0.0);
        for (std::size_t r = 0; r < R; ++r) {
            const auto y = binomial_thin(x, p, stable_mix(1, r, p));
            for (std::size_t t = 0; t < y.size(); ++t) {
                sum[t] += y[t];
                sq[t] += y[t] * y[t];
            }
        }
        const double expected = p * (1.0 - p) * 100.0;
        for (std::size_t t = 0; t < x.size(); ++t) {
            const double m = sum[t] / R;
            const double var = (sq[t] - R * m * m) / (R - 1.0);
            worst = std::max(worst, std::abs(var - expected) / expected);
        }
    }
    return {worst <= 0.02, "max relative error over 9 rates x 200 steps " + fmt("%.4f", worst)};
}

// 2 -------------------------------------------------------------------------
Outcome autocorrelation_decay() {
    const auto x = ar1_counts(0.8, 5.0, 50.0, 5000, 2);
    const auto m = moments(x);
    const double c = autocorrelation(x, 1) * m.variance;
    double worst = 0.0;
    for (double p : rate_grid()) {
        std::vector<double> acf;
        for (std::size_t r = 0; r < 200; ++r) acf.push_back(autocorrelation(binomial_thin(x, p, stable_mix(2, r, p)), 1));
        worst = std::max(worst, std::abs(median(acf) - predicted_autocorrelation({m.variance, m.mean, c, p})));
    }
    return {worst <= 0.03, "max |median - predicted| over 10 rates " + fmt("%.4f", worst)};
}

// 3 -------------------------------------------------------------------------
Outcome monotonicity() {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t violations = 0;
    double worst_fd = 0.0;
    for (int draw = 0; draw < 1000; ++draw) {
        const double v = 0.01 + 100.0 * u(rng);
        const double e = 0.01 + 100.0 * u(rng);
        const double c = (2.0 * u(rng) - 1.0) * v;
        double prev = 0.0;
        for (int k = 1; k <= 100; ++k) {
            const double r = std::abs(predicted_autocorrelation({v, e, c, k / 100.0}));
            if (r < prev - 1e-15) ++violations;
            prev = r;
        }
        for (int k = 1; k <= 9; ++k) {
            const double p = k / 10.0;
            const double h = 1e-5;
            const auto rho2 = [&](double q) {
                const double r = predicted_autocorrelation({v, e, c, q});
                return r * r;
            };
            const double fd = (rho2(p + h) - rho2(p - h)) / (2.0 * h);
            const double an = autocorrelation_sq_derivative({v, e, c, p});
            if (an < 0.0) ++violations;
            worst_fd = std::max(worst_fd, std::abs(an - fd) / std::max(1.0, std::abs(fd)));
        }
    }
    return {violations == 0 && worst_fd <= 1e-6,
            std::to_string(violations) + " violations; max derivative mismatch " + fmt("%.2e", worst_fd)};
}

// 4 -------------------------------------------------------------------------
Outcome external_covariance() {
    const auto res = run_sweep(coupled_sweep({"cov_external"}, 1000, {0.3, 0.5, 0.8}, 4));
    std::map<double, std::pair<double, double>> acc;  // rate -> (sum empirical, theory)
    for (const auto& r : res.records) {
        acc[r.rate].first += r.empirical;
        acc[r.rate].second = *r.theoretical;
    }
    double worst = 0.0;
    for (const auto& [p, v] : acc) {
        const double mean = v.first / 1000.0;
        worst = std::max(worst, std::abs(mean - v.second) / std::abs(v.second));
    }
    return {worst <= 0.05, "max relative error at p = 0.3, 0.5, 0.8: " + fmt("%.4f", worst)};
}

// 5 -------------------------------------------------------------------------
Outcome pearson_regimes() {
    const double rho = 0.8;
    const double flu = predicted_external_pearson(rho, {1e6 * 5.0, 5.0, 0.0, 0.1}, 3.0);
    const double crypto = predicted_external_pearson(rho, {7.0, 7.0, 0.0, 0.1}, 3.0);
    const double flu_err = std::abs(flu - rho) / rho;
    const double drop = (rho - crypto) / rho;
    return {flu_err <= 0.01 && drop >= 0.20,
            "Var/E = 1e6: relative change " + fmt("%.2e", flu_err) + "; Var = E: drop " + fmt("%.3f", drop)};
}

// 6 -------------------------------------------------------------------------
std::size_t oracle_pattern(const std::vector<double>& w) {
    std::vector<int> idx(w.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return w[a] < w[b]; });
    std::vector<int> perm(w.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::size_t rank = 0;
    while (perm != idx) {
        std::next_permutation(perm.begin(), perm.end());
        ++rank;
    }
    return rank;
}

Outcome wpe_correctness() {
    std::vector<double> ramp(1000);
    std::iota(ramp.begin(), ramp.end(), 0.0);
    const double mono = weighted_permutation_entropy(ramp, {3, 1});

    std::mt19937_64 rng(6);
    std::normal_distribution<double> z(100.0, 10.0);
    std::vector<double> noise(100000);
    for (auto& v : noise) v = std::max(0.0, z(rng));
    const double iid = weighted_permutation_entropy(noise, {3, 1});

    std::uniform_int_distribution<int> small(0, 4);
    std::uniform_int_distribution<int> order(2, 6);
    std::size_t mismatches = 0;
    for (int i = 0; i < 10000; ++i) {
        const int d = order(rng);
        std::vector<double> w(static_cast<std::size_t>(d));
        for (auto& v : w) v = small(rng);
        if (ordinal_pattern(w, d) != oracle_pattern(w)) ++mismatches;
    }
    return {mono == 0.0 && std::abs(iid - 1.0) <= 0.01 && mismatches == 0,
            "monotone " + fmt("%g", mono) + "; iid " + fmt("%.5f", iid) + "; " + std::to_string(mismatches) +
                " oracle mismatches in 10^4 windows"};
}

// 7 -------------------------------------------------------------------------
Outcome wpe_trend() {
    const int R = 50;
    std::vector<double> full, thin;
    int higher = 0;
    for (int r = 0; r < R; ++r) {
        const auto x = ar1_counts(0.8, 5.0, 50.0, 2000, 700 + static_cast<std::uint64_t>(r));
        const auto cfg = select_ordinal_params(x);
        const double w1 = weighted_permutation_entropy(x, cfg);
        const double w01 = weighted_permutation_entropy(binomial_thin(x, 0.1, stable_mix(7, r, 0.1)), cfg);
        full.push_back(w1);
        thin.push_back(w01);
        if (w01 > w1) ++higher;
    }
    const double pv = sign_test_p_value(higher, R);
    return {median(thin) >= median(full) && pv < 0.05,
            "median WPE p=0.1 " + fmt("%.4f", median(thin)) + " vs p=1 " + fmt("%.4f", median(full)) +
                "; sign test " + std::to_string(higher) + "/50, p-value " + fmt("%.2e", pv)};
}

// 8 -------------------------------------------------------------------------
Outcome mi_decay() {
    const auto res = run_sweep(coupled_sweep({"mi"}, 50, rate_grid(), 8));
    const auto mi = by_rate(res, "mi");
    bool monotone = true;
    double prev = -1.0;
    std::string curve;
    for (const auto& [p, v] : mi) {
        const double m = median(v);
        if (m < prev) monotone = false;
        prev = m;
        curve += fmt(" %.3f", m);
    }
    const double top = mi.at(1.0).front();
    int lower = 0;
    for (double v : mi.at(0.1)) lower += v < top;
    const double pv = sign_test_p_value(lower, 50);

    std::mt19937_64 rng(88);
    std::poisson_distribution<int> pois(20.0);
    std::vector<double> a(100000), b(100000);
    for (auto& v : a) v = pois(rng);
    for (auto& v : b) v = pois(rng);
    const double indep = mutual_information(a, b, default_bin_count(a.size()));
    return {monotone && pv < 0.05 && indep <= 0.01,
            "median MI by rate (0.1..1):" + curve + "; p=0.1 below p=1 in " + std::to_string(lower) +
                "/50, p-value " + fmt("%.2e", pv) + "; independent MI " + fmt("%.4f", indep)};
}

// 9 -------------------------------------------------------------------------
Outcome forecast_trends() {
    const auto res = run_sweep(coupled_sweep({"nrmse", "nrmse_poisson"}, 50, rate_grid(), 9));
    const auto ar = by_rate(res, "nrmse");
    const auto po = by_rate(res, "nrmse_poisson");
    bool monotone = true;
    double prev_ar = 1e300, prev_po = 1e300;
    std::string curve;
    for (const auto& [p, v] : ar) {
        const double ma = median(v);
        const double mp = median(po.at(p));
        if (ma > prev_ar || mp > prev_po) monotone = false;
        prev_ar = ma;
        prev_po = mp;
        curve += fmt(" %.3f", ma) + fmt("/%.3f", mp);
    }
    const double gap1 = median(po.at(1.0)) - median(ar.at(1.0));
    const double gap01 = median(po.at(0.1)) - median(ar.at(0.1));
    const double ratio = gap01 / gap1;

    // At p = 1 thinning is the identity, so confidence comes from the paired
    // per-step absolute errors on the test segment.
    const auto x = load_series_csv(fixture_dir() / "coupled.csv", "ground");
    const std::span<const double> all(x.data());
    const auto train = static_cast<std::size_t>(std::floor(0.7 * static_cast<double>(x.size())));
    const auto run_ar = rolling_forecast(x, 0.7, select_order_aic(all.first(train), 3, 2));
    const auto run_po = poisson_forecast(x, 0.7);
    int ar_wins = 0;
    for (std::size_t i = 0; i < run_ar.horizon; ++i) ar_wins += std::abs(run_ar.residuals[i]) < std::abs(run_po.residuals[i]);
    const double pv = sign_test_p_value(ar_wins, static_cast<int>(run_ar.horizon));
    return {monotone && gap1 > 0.0 && pv < 0.05 && ratio <= 0.25,
            "median AR/Poisson NRMSE (0.1..1):" + curve + "; AR better on " + std::to_string(ar_wins) + "/" +
                std::to_string(run_ar.horizon) + " steps, p-value " + fmt("%.2e", pv) + "; gap ratio " +
                fmt("%.3f", ratio)};
}

// 10 ------------------------------------------------------------------------
Outcome elm_calibration() {
    int null_rej = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        std::mt19937_64 rng(10000 + seed);
        std::normal_distribution<double> z(0.0, 1.0);
        std::vector<double> e(2000);
        for (auto& v : e) v = z(rng);
        null_rej += elm_arch_test(e, 5).lags[4].rejects();
    }
    int power = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        power += elm_arch_test(arch1_trace(2000, 0.2, 0.7, 20000 + seed), 1).lags[0].rejects();
    }
    const double size = null_rej / 200.0;
    const double pow = power / 200.0;

    const int R = 50;
    int more = 0, ties = 0;
    double sum_thin = 0.0, sum_full = 0.0;
    for (int r = 0; r < R; ++r) {
        const auto x = ar1_counts(0.9, 20.0, 60.0, 2000, 1000 + static_cast<std::uint64_t>(r));
        const auto y = binomial_thin(x, 0.1, stable_mix(10, r, 0.1));
        const auto frac = [](const CountSeries& s) {
            const auto run = rolling_forecast(s, 0.5, {1, 0}, s.size());
            return elm_arch_test(run.residuals, 40).rejection_fraction(6, 40);
        };
        const double ft = frac(y);
        const double ff = frac(x);
        sum_thin += ft;
        sum_full += ff;
        if (ft > ff) ++more;
        if (ft == ff) ++ties;
    }
    const double pv = sign_test_p_value(more, R - ties);
    return {size >= 0.02 && size <= 0.10 && pow >= 0.9 && pv < 0.05,
            "null size " + fmt("%.3f", size) + "; ARCH(1) power " + fmt("%.3f", pow) +
                "; mean rejection fraction lags 6-40 thinned " + fmt("%.3f", sum_thin / R) + " vs unthinned " +
                fmt("%.3f", sum_full / R) + ", thinned higher in " + std::to_string(more) + "/" +
                std::to_string(R - ties) + ", p-value " + fmt("%.2e", pv)};
}

// 11 ------------------------------------------------------------------------
Outcome determinism() {
    const auto dir = thinpred::testing::scratch_dir("acceptance");
    thinpred::testing::write_file(dir / "sweep.json", R"({
        "source": {"csv": {"path": ")" + (fixture_dir() / "coupled.csv").string() + R"(", "column": "ground"}},
        "external": {"column": "external"},
        "rates": [0.1, 0.3, 0.5, 0.7, 1.0], "replicates": 5, "base_seed": 11,
        "metrics": ["autocorr", "cov_external", "pearson_external", "mi", "wpe", "nrmse", "nrmse_poisson"],
        "window": {"length": 200, "count": 2}
    })");
    std::string bytes[2];
    for (int i = 0; i < 2; ++i) {
        const auto out = dir / ("run" + std::to_string(i) + ".csv");
        const std::string cmd = std::string("'") + THINPRED_CLI_PATH + "' sweep --config '" +
                                (dir / "sweep.json").string() + "' --out '" + out.string() + "'";
        const int st = std::system(cmd.c_str());
        if (!WIFEXITED(st) || WEXITSTATUS(st) != 0) return {false, "sweep exited with status " + std::to_string(st)};
        bytes[i] = thinpred::testing::read_file(out);
    }
    std::size_t lines = std::count(bytes[0].begin(), bytes[0].end(), '\n');
    return {!bytes[0].empty() && bytes[0] == bytes[1],
            std::to_string(bytes[0].size()) + " bytes, " + std::to_string(lines) + " lines, identical: " +
                (bytes[0] == bytes[1] ? "yes" : "no")};
}

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "variance law under thinning", 30, variance_law},
        {2, "autocorrelation decay", 120, autocorrelation_decay},
        {3, "monotonicity in the sampling rate", 5, monotonicity},
        {4, "external-signal covariance", 60, external_covariance},
        {5, "Pearson correlation regimes", 1, pearson_regimes},
        {6, "weighted permutation entropy correctness", 30, wpe_correctness},
        {7, "permutation entropy sampling trend", 120, wpe_trend},
        {8, "mutual information decay", 120, mi_decay},
        {9, "forecast error trends", 600, forecast_trends},
        {10, "ELM calibration and thinning-induced ARCH", 300, elm_calibration},
        {11, "sweep determinism", 60, determinism},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_budget = secs < c.budget_s;
        const bool pass = o.pass && in_budget;
        failures += !pass;
        std::printf("%s %2d %s: %s [%.2fs, budget %.0fs%s]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    o.detail.c_str(), secs, c.budget_s, in_budget ? "" : ", over budget");
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
