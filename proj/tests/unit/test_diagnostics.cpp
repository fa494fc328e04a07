#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "thinpred/diagnostics.hpp"
#include "thinpred/fixtures.hpp"
#include "thinpred/sampling.hpp"

using namespace thinpred;

namespace {

double simpson(const std::function<double(double)>& f, double a, double b) {
    const double m = 0.5 * (a + b);
    return (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
}

double adaptive(const std::function<double(double)>& f, double a, double b, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double left = simpson(f, a, m);
    const double right = simpson(f, m, b);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) return left + right + (left + right - whole) / 15.0;
    return adaptive(f, a, m, left, tol / 2, depth - 1) + adaptive(f, m, b, right, tol / 2, depth - 1);
}

// CDF of chi-square(k) by adaptive Simpson on the density after t = u^2,
// which removes the u^{-1/2} singularity at 0 for k = 1.
double chi2_cdf_oracle(double x, int k) {
    if (x <= 0.0) return 0.0;
    const double half = 0.5 * k;
    const double log_norm = -half * std::log(2.0) - std::lgamma(half);
    const auto g = [&](double u) {
        if (u == 0.0) return k == 1 ? 2.0 * std::exp(log_norm) : 0.0;
        const double t = u * u;
        return 2.0 * u * std::exp(log_norm + (half - 1.0) * std::log(t) - 0.5 * t);
    };
    const double b = std::sqrt(x);
    return adaptive(g, 0.0, b, simpson(g, 0.0, b), 1e-13, 50);
}

std::vector<double> gaussian(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> e(n);
    for (auto& v : e) v = z(rng);
    return e;
}

}  // namespace

TEST(ChiSquare, ClosedFormsAndReferencePoint) {
    for (int k = 1; k <= 10; ++k) EXPECT_EQ(chi_square_sf(0.0, k), 1.0);
    EXPECT_NEAR(chi_square_sf(2.0, 2), std::exp(-1.0), 1e-14);
    EXPECT_NEAR(chi_square_sf(3.841, 1), 0.05, 1e-4);
    EXPECT_NEAR(chi_square_sf(3.841, 1), 1.0 - chi2_cdf_oracle(3.841, 1), 1e-10);
    EXPECT_THROW((void)chi_square_sf(1.0, 0), std::invalid_argument);
    EXPECT_THROW((void)chi_square_sf(-1.0, 2), std::invalid_argument);
}

TEST(ChiSquare, SfPlusCdfAgainstIntegrationOracle) {
    for (int k : {1, 2, 5, 10, 40}) {
        double prev = 1.0;
        for (int i = 1; i <= 100; ++i) {
            const double x = 0.6 * i * std::max(1.0, k / 5.0);
            const double sf = chi_square_sf(x, k);
            EXPECT_LE(sf, prev);
            prev = sf;
            EXPECT_NEAR(sf + chi2_cdf_oracle(x, k), 1.0, 1e-10) << "k=" << k << " x=" << x;
            EXPECT_NEAR(sf + chi_square_cdf(x, k), 1.0, 1e-12);
        }
    }
}

TEST(ElmArchTest, NullSizeAtLagFive) {
    int rejections = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto r = elm_arch_test(gaussian(2000, 1000 + seed), 5);
        if (r.lags[4].rejects()) ++rejections;
    }
    const double rate = rejections / 200.0;
    EXPECT_GE(rate, 0.02);
    EXPECT_LE(rate, 0.10);
}

TEST(ElmArchTest, PowerAgainstArch1) {
    int rejections = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto e = arch1_trace(2000, 0.2, 0.7, 5000 + seed);
        if (elm_arch_test(e, 1).lags[0].rejects()) ++rejections;
    }
    EXPECT_GE(rejections / 200.0, 0.9);
}

TEST(ElmArchTest, RecordsAndInvariants) {
    const auto e = gaussian(300, 4);
    const auto r = elm_arch_test(e, 10);
    ASSERT_EQ(r.lags.size(), 10u);
    EXPECT_EQ(r.max_lag, 10);
    EXPECT_EQ(r.n_effective, 290u);
    for (const auto& rec : r.lags) {
        EXPECT_EQ(rec.n_effective, 300u - static_cast<std::size_t>(rec.lag));
        EXPECT_GE(rec.lm, 0.0);
        EXPECT_GE(rec.p_value, 0.0);
        EXPECT_LE(rec.p_value, 1.0);
        EXPECT_NEAR(rec.p_value, chi_square_sf(rec.lm, rec.lag), 0.0);
    }
}

TEST(ElmArchTest, ScaleInvariance) {
    const auto e = arch1_trace(800, 0.2, 0.5, 12);
    const auto base = elm_arch_test(e, 8);
    std::vector<double> doubled(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) doubled[i] = 2.0 * e[i];
    const auto twice = elm_arch_test(doubled, 8);
    for (std::size_t i = 0; i < base.lags.size(); ++i) EXPECT_EQ(base.lags[i].lm, twice.lags[i].lm);

    std::vector<double> scaled(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) scaled[i] = 3.7 * e[i];
    const auto other = elm_arch_test(scaled, 8);
    for (std::size_t i = 0; i < base.lags.size(); ++i) {
        EXPECT_NEAR(base.lags[i].lm, other.lags[i].lm, 1e-9 * (1.0 + base.lags[i].lm));
    }
}

TEST(ElmArchTest, Guards) {
    EXPECT_THROW((void)elm_arch_test(gaussian(25, 1), 6), std::invalid_argument);
    EXPECT_THROW((void)elm_arch_test(gaussian(100, 1), 0), std::invalid_argument);
    std::vector<double> alternating(100);
    for (std::size_t i = 0; i < alternating.size(); ++i) alternating[i] = (i % 2) ? 1.0 : -1.0;
    EXPECT_THROW((void)elm_arch_test(alternating, 3), std::domain_error);
}

TEST(ElmArchTest, RejectionFraction) {
    ArchTestResult r;
    r.lags = {{1, 10.0, 0.001, 99}, {2, 1.0, 0.6, 98}, {3, 9.0, 0.03, 97}, {4, 0.1, 0.99, 96}};
    EXPECT_DOUBLE_EQ(r.rejection_fraction(1, 4), 0.5);
    EXPECT_DOUBLE_EQ(r.rejection_fraction(2, 3), 0.5);
    EXPECT_DOUBLE_EQ(r.rejection_fraction(3, 3), 1.0);
    EXPECT_DOUBLE_EQ(r.rejection_fraction(9, 10), 0.0);
}

TEST(WriteArchCsv, Format) {
    ArchTestResult r;
    r.lags = {{1, 2.0, std::exp(-1.0), 10}};
    std::ostringstream os;
    write_arch_csv(r, os);
    EXPECT_EQ(os.str(), "lag,lm,p_value\n1,2,0.367879441\n");
}

TEST(VarianceRecursion, RecoversGroundAr1Coefficient) {
    const auto x = thinpred::testing::ar1_path(0.7, 4.0, 60.0, 10000, 33);
    const auto rec = conditional_variance_recursion(x, 0.4);
    EXPECT_NEAR(rec.coefficient, 0.7, 0.05);
    EXPECT_EQ(rec.scaled_noise.size(), x.size() - 1);
    // The proxy noise is the ground-truth innovation scaled by p (1 - p).
    double sq = 0.0;
    for (double v : rec.scaled_noise) sq += v * v;
    EXPECT_NEAR(std::sqrt(sq / rec.scaled_noise.size()), 4.0 * 0.4 * 0.6, 0.05 * 4.0 * 0.4 * 0.6);
    EXPECT_THROW((void)conditional_variance_recursion(x, 1.0), std::domain_error);
    EXPECT_THROW((void)conditional_variance_recursion(x, 1.5), std::invalid_argument);
}
