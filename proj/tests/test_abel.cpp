#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "delaywarp/abel.hpp"
#include "delaywarp/experiments.hpp"
#include "delaywarp/perturbation.hpp"
#include "test_support.hpp"

namespace delaywarp {
namespace {

constexpr double kTau0 = 3.0;
constexpr double kOmega = 5.0;

PeriodicDelay paper_delay(double eps) { return PeriodicDelay::sinusoid(kTau0, kOmega, eps); }

TEST(GInverse, RoundTrip) {
    SplitMix64 rng(5);
    for (double eps : {0.01, 0.1, 0.19}) {
        const auto d = paper_delay(eps);
        for (int i = 0; i < 200; ++i) {
            const double x = rng.uniform(-5.0, 100.0);
            const double t = g_inverse(d, x);
            EXPECT_LE(std::abs(d.g(t) - x), 1e-12 * std::max(1.0, std::abs(x)));
        }
    }
}

TEST(GInverse, InvertsG) {
    const auto d = paper_delay(0.1);
    for (double t : uniform_points(17, 100, 0.0, 60.0)) EXPECT_LT(std::abs(g_inverse(d, d.g(t)) - t), 1e-10);
}

// t = x + tau(t) is a contraction when |tau'| < 1; iterate to a fixed point.
TEST(GInverse, MatchesFixedPointIteration) {
    const auto d = paper_delay(0.1);
    for (double x : {-3.0, 0.0, 0.37, 5.5, 29.0}) {
        double t = x + kTau0;
        for (int i = 0; i < 500; ++i) t = x + d.tau(t);
        EXPECT_NEAR(g_inverse(d, x), t, 1e-11);
    }
}

TEST(GInverse, ConstantDelayIsShift) {
    const auto d = paper_delay(0.0);
    EXPECT_EQ(g_inverse(d, 1.25), 1.25 + kTau0);
}

TEST(SeedFit, SatisfiesConditionsAndTracksSeries) {
    const auto d = paper_delay(0.01);
    const auto target = SeriesTransform::build(d, kTau0, 2);
    const auto seed = fit_seed(d, kTau0, target);
    const auto c = check_seed(seed, d);
    EXPECT_LT(std::abs(c.origin), 1e-12);
    EXPECT_LT(std::abs(c.left_end), 1e-12);
    EXPECT_LT(std::abs(c.slope_match), 1e-12);
    EXPECT_GT(c.min_slope, 0.9);
    EXPECT_TRUE(c.ok());
    // The series itself violates the slope condition by ~48 eps^3, so the
    // constrained fit cannot follow it more closely than a few 1e-6.
    EXPECT_LT(seed.fit_sup_error, 5e-6);
    EXPECT_LT(seed.constraint_condition, 1e6);
}

TEST(SeedFit, BasisDerivativeMatchesFiniteDifference) {
    const double nu = 4.2;
    for (double l : {-2.5, -1.0, -0.1, 0.0}) {
        const auto b = SeedFunction::basis_derivative(l, nu);
        const auto p = SeedFunction::basis(l + 1e-6, nu);
        const auto m = SeedFunction::basis(l - 1e-6, nu);
        for (int i = 0; i < SeedFunction::kSize; ++i) EXPECT_NEAR((p[i] - m[i]) / 2e-6, b[i], 1e-7);
    }
}

TEST(Propagate, RejectsSeedViolatingConditions) {
    SeedFunction::Coefficients c{};
    c[0] = 1.0;  // h = l misses phi(-tau*) = -tau(0) since tau(0) != tau*
    const SeedFunction bad(2.0, 1.0, c);
    EXPECT_THROW(propagate(bad, paper_delay(0.01), 10.0), ConstraintError);
}

TEST(Propagate, ConstantDelayGivesIdentity) {
    SeedFunction::Coefficients c{};
    c[0] = 1.0;
    const SeedFunction seed(kTau0, kOmega, c);
    const auto tt = propagate(seed, paper_delay(0.0), 20.0);
    for (double l : linspace(-kTau0, 20.0, 301)) {
        EXPECT_NEAR(tt.h(l), l, 1e-12);
        EXPECT_NEAR(tt.h_dot(l), 1.0, 1e-10);
    }
}

class ExactTransform : public ::testing::TestWithParam<double> {};

TEST_P(ExactTransform, AbelResidualAtRandomPoints) {
    const auto d = paper_delay(GetParam());
    const auto tt = build_exact_transform(d, kTau0, 30.0);
    EXPECT_GE(tt.horizon(), 30.0);
    const auto pts = uniform_points(20240917, 1000, 0.0, 30.0);
    EXPECT_LT(abel_residual(tt, d, kTau0, pts).sup, 1e-9);
}

TEST_P(ExactTransform, ContinuousAndSmoothAcrossIntervalBoundaries) {
    const auto d = paper_delay(GetParam());
    const auto tt = build_exact_transform(d, kTau0, 30.0);
    for (int k = 0; k * kTau0 <= 27.0; ++k) {
        const double l = k * kTau0;
        const double dl = 1e-9;
        EXPECT_LT(std::abs(tt.h(l + dl) - tt.h(l - dl)), 1e-8) << "k=" << k;
        EXPECT_LT(std::abs(tt.h_dot(l + dl) - tt.h_dot(l - dl)), 1e-6) << "k=" << k;
    }
}

TEST_P(ExactTransform, InterpolantDerivativeMatchesChainRule) {
    const auto d = paper_delay(GetParam());
    const auto tt = build_exact_transform(d, kTau0, 30.0);
    for (double l : uniform_points(7, 300, 0.0, 30.0)) {
        EXPECT_LT(std::abs(tt.h_dot(l) - chain_rule_h_dot(tt, d, l)), 1e-6) << "lambda=" << l;
    }
}

TEST_P(ExactTransform, GridRefinementConverges) {
    const auto d = paper_delay(GetParam());
    AbelOptions fine;
    fine.samples_per_interval = 1600;
    const auto a = build_exact_transform(d, kTau0, 30.0);
    const auto b = build_exact_transform(d, kTau0, 30.0, fine);
    double sup = 0;
    for (double l : linspace(-kTau0, 30.0, 3001)) sup = std::max(sup, std::abs(a.h(l) - b.h(l)));
    EXPECT_LT(sup, 1e-8);
}

TEST_P(ExactTransform, StrictlyIncreasing) {
    const auto d = paper_delay(GetParam());
    const auto tt = build_exact_transform(d, kTau0, 30.0);
    const auto v = tt.knot_values();
    for (std::size_t i = 1; i < v.size(); ++i) ASSERT_GT(v[i], v[i - 1]);
    for (double s : tt.knot_slopes()) ASSERT_GT(s, 0.0);
}

INSTANTIATE_TEST_SUITE_P(Eps, ExactTransform, ::testing::Values(0.01, 0.1));

TEST(ExactTransform, CloseToSecondOrderSeriesForSmallEps) {
    const auto d = paper_delay(0.01);
    const auto ex = build_exact_transform(d, kTau0, 30.0);
    const auto o2 = SeriesTransform::build(d, kTau0, 2);
    double sup = 0;
    for (double l : linspace(0.0, 3.0, 1201)) sup = std::max(sup, std::abs(ex.h_dot(l) - o2.h_dot(l)));
    EXPECT_LT(sup, 5e-4);
}

TEST(ExactTransform, EstimatedSlopesStillSolveAbel) {
    const auto d = paper_delay(0.01);
    AbelOptions opt;
    opt.slopes = KnotSlopes::estimated;
    const auto tt = build_exact_transform(d, kTau0, 30.0, opt);
    EXPECT_LT(abel_residual(tt, d, kTau0, uniform_points(3, 500, 0.0, 30.0)).sup, 1e-7);
}

TEST(ExactTransform, DomainIsBounded) {
    const auto tt = build_exact_transform(paper_delay(0.01), kTau0, 9.0);
    EXPECT_THROW((void)tt.h(-kTau0 - 0.01), DomainError);
    EXPECT_THROW((void)tt.h(tt.horizon() + 0.01), DomainError);
    EXPECT_NO_THROW((void)tt.h(tt.horizon()));
}

TEST(KnotTable, CsvRoundTrip) {
    const auto tt = build_exact_transform(paper_delay(0.05), kTau0, 6.0);
    std::stringstream a;
    write_knot_table(tt, a);
    const auto back = read_knot_table(a);
    std::stringstream b;
    write_knot_table(back, b);
    EXPECT_EQ(a.str(), b.str());
    EXPECT_EQ(back.tau_star(), tt.tau_star());
    for (double l : linspace(-kTau0, 6.0, 211)) EXPECT_EQ(back.h(l), tt.h(l));
}

TEST(KnotTable, RejectsMalformedInput) {
    std::stringstream no_header("1,2,3\n");
    EXPECT_THROW(read_knot_table(no_header), ConfigError);
    std::stringstream bad_row("lambda,h,h_dot\n-1,0,1\nfoo\n");
    EXPECT_THROW(read_knot_table(bad_row), ConfigError);
}

// Random shapes with tau* != tau0 still yield a table that solves the equation.
TEST(AbelProperty, RandomShapes) {
    SplitMix64 rng(77);
    int checked = 0;
    while (checked < 6) {
        const double omega = rng.uniform(0.5, 3.0);
        const double tau0 = rng.uniform(1.0, 4.0);
        const int K = 1 + static_cast<int>(rng.next() % 3);
        if (!testing::well_separated(omega, tau0, K)) continue;
        ++checked;
        const PeriodicDelay d(tau0, 0.01, testing::random_shape(rng, omega, K));
        const double tau_star = tau0 * rng.uniform(0.8, 1.2);
        const auto tt = build_exact_transform(d, tau_star, 6.0 * tau_star);
        EXPECT_LT(abel_residual(tt, d, tau_star, uniform_points(checked, 300, 0.0, 6.0 * tau_star)).sup, 1e-8);
        EXPECT_LT(std::abs(tt.h(0.0)), 1e-10);
    }
}

} // namespace
} // namespace delaywarp
