#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using namespace msstab;
using namespace msstab::testing;

TEST(VariationValidator, FiniteDifferencesOfPolynomialsAreExact) {
    const std::vector<double> t{-0.01, -0.005, 0.0, 0.005, 0.01};
    std::vector<double> g;
    for (double s : t) g.push_back(3.0 + 2.0 * s + 5.0 * s * s);
    const FdEstimate e = fd_derivatives(t, g);
    EXPECT_NEAR(e.first, 2.0, 1e-10);
    EXPECT_NEAR(e.second, 10.0, 1e-8);
    EXPECT_NEAR(e.second_error, 0.0, 1e-8);
}

TEST(VariationValidator, RichardsonRemovesLeadingError) {
    const std::vector<double> t{-0.1, -0.05, 0.0, 0.05, 0.1};
    std::vector<double> g;
    for (double s : t) g.push_back(std::cos(s));
    const FdEstimate e = fd_derivatives(t, g);
    EXPECT_NEAR(e.first, 0.0, 1e-15);
    EXPECT_LT(std::abs(e.second + 1.0), 1e-6);
    EXPECT_GT(std::abs(e.second_small_step + 1.0), 1e-4);  // plain central difference is worse
    EXPECT_GT(e.second_error, 0.0);
}

TEST(VariationValidator, SampleLayoutIsChecked) {
    const std::vector<double> t{-0.01, 0.0, 0.01};
    const std::vector<double> g{1.0, 1.0, 1.0};
    try {
        (void)fd_derivatives(t, g);
        FAIL() << "expected InsufficientSamples";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InsufficientSamples);
    }
    const std::vector<double> skew{-0.02, -0.005, 0.0, 0.005, 0.01};
    EXPECT_THROW((void)fd_derivatives(skew, std::vector<double>(5, 1.0)), Error);
}

TEST(VariationValidator, ExamplePairIsCritical) {
    const StripDomain d = example_strip();
    const GraphCurve c = GraphCurve::flat(1.0, 32);
    const auto [u, s] = solve_state(d, c, Grid{32, 32});
    const CriticalityReport r = criticality_residuals(d, c, u);
    EXPECT_TRUE(r.critical(1e-6));
    EXPECT_NEAR(r.min_jump, 1.0, 1e-8);  // jump 2x+1 on the nodes of [0,1)
    EXPECT_EQ(r.min_jump_x, 0.0);
    EXPECT_FALSE(r.orthogonality_defect.has_value());
}

TEST(VariationValidator, TranslationFlowKeepsEnergyConstant) {
    const StripDomain d = example_strip();
    const GraphCurve c = GraphCurve::flat(1.0, 32);
    const FlowSpec flow = make_flow(d, std::vector<double>(32, 1.0), {-0.2, -0.1, 0.0, 0.1, 0.2});
    const auto g = energy_along_flow(d, c, flow, Grid{32, 32});
    for (double v : g) EXPECT_NEAR(v, g[2], 1e-8 * g[2]);
    EXPECT_NEAR(g[2], 3.0, 1e-9);  // 2ab + b
}

TEST(VariationValidator, EnergyIsEvenForSymmetricFlow) {
    // sin(2 pi x) and its reflection produce mirror images of the Example 7.3 pair
    const StripDomain d = example_strip();
    const GraphCurve c = GraphCurve::flat(1.0, 32);
    const auto dir = sample(32, 1.0, [](double x) { return std::sin(2 * pi * x); });
    const FlowSpec flow = make_flow(d, dir, {-0.01, 0.01});
    const auto g = energy_along_flow(d, c, flow, Grid{32, 32});
    EXPECT_NEAR(g[0], g[1], 1e-9);
}

TEST(VariationValidator, ScheduleDoesNotChangeSamples) {
    const StripDomain d = example_strip();
    const GraphCurve c = GraphCurve::flat(1.0, 32);
    const auto dir = sample(32, 1.0, [](double x) { return std::cos(2 * pi * x); });
    const FlowSpec flow = make_flow(d, dir, {-0.01, -0.005, 0.0, 0.005, 0.01});
    const auto serial = energy_along_flow(d, c, flow, Grid{32, 32}, {}, 1);
    const auto threaded = energy_along_flow(d, c, flow, Grid{32, 32}, {}, 3);
    EXPECT_EQ(serial, threaded);
}

TEST(VariationValidator, ExamplePairPasses) {
    const StripDomain d = example_strip();
    const GraphCurve c = GraphCurve::flat(1.0, 64);
    const Grid grid{64, 64};
    const auto [u, s] = solve_state(d, c, grid);
    const auto dir = sample(64, 1.0, [](double x) { return std::sin(2 * pi * x); });
    const ValidationReport r = validate_second_variation(d, c, u, dir, grid);
    EXPECT_TRUE(r.critical);
    EXPECT_TRUE(r.first_variation_ok);
    EXPECT_TRUE(r.second_variation_ok) << "mismatch " << r.mismatch;
    EXPECT_TRUE(r.passed());
    EXPECT_LE(r.assembled.mismatch(), 1e-6);
}

TEST(VariationValidator, ConstantDirectionHasZeroSecondVariation) {
    const StripDomain d = example_strip();
    const GraphCurve c = GraphCurve::flat(1.0, 32);
    const Grid grid{32, 32};
    const auto [u, s] = solve_state(d, c, grid);
    const ValidationReport r = validate_second_variation(d, c, u, std::vector<double>(32, 1.0), grid);
    EXPECT_NEAR(r.assembled.value(), 0.0, 1e-9);
    EXPECT_NEAR(r.fd.second, 0.0, 1e-6);
    EXPECT_NEAR(r.fd.first, 0.0, 1e-9);
    EXPECT_TRUE(r.passed());
}

TEST(VariationValidator, PerturbedCurveIsFlaggedNotCritical) {
    const StripDomain d = example_strip();
    const GraphCurve c = GraphCurve::sample(1.0, 32, [](double x) { return 0.05 * std::sin(2 * pi * x); });
    const Grid grid{32, 32};
    const auto [u, s] = solve_state(d, c, grid);
    const auto dir = sample(32, 1.0, [](double x) { return std::cos(2 * pi * x); });
    const ValidationReport r = validate_second_variation(d, c, u, dir, grid);
    EXPECT_FALSE(r.critical);
    EXPECT_GT(r.criticality.transmission_sup, 1e-2);
    EXPECT_FALSE(r.passed());
    EXPECT_EQ(r.samples.size(), 5u);
}

TEST(VariationValidator, SegmentResidualsVanish) {
    const CriticalityReport r = criticality_residuals(SegmentConfig{1.0, 1.0, 1.0});
    EXPECT_TRUE(r.critical(0.0));
    ASSERT_TRUE(r.orthogonality_defect.has_value());
    EXPECT_EQ(*r.orthogonality_defect, 0.0);
}
