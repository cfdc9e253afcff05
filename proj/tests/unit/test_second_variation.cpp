#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"

using namespace msstab;
using namespace msstab::testing;

namespace {

struct Fixture {
    StripDomain domain;
    GraphCurve curve;
    Grid grid;
    TOperator op;
};

Fixture make_setup(const StripDomain& d, const GraphCurve& c, std::size_t ny, Restriction r = Restriction::mean_zero) {
    const Grid grid{c.size(), ny};
    auto [u, s] = solve_state(d, c, grid);
    TOperator op(d, c, std::move(u), grid, assemble_tilde_gram(c, r));
    return Fixture{d, c, grid, std::move(op)};
}

Fixture flat_setup(std::size_t n, double a = 1.0, double b = 1.0) {
    return make_setup(example_strip(a, b), GraphCurve::flat(b, n), n);
}

std::vector<double> random_phi(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> dist;
    std::vector<double> phi(n);
    for (double& v : phi) v = dist(rng);
    return phi;
}

}  // namespace

TEST(SecondVariation, GramOfCosineMode) {
    // ||cos(2 pi x / b)||~^2 = int phi'^2 = 2 pi^2 / b on the flat curve
    for (double b : {1.0, 2.0}) {
        const GraphCurve c = GraphCurve::flat(b, 128);
        const TildeGram g = assemble_tilde_gram(c, Restriction::mean_zero);
        const auto phi = sample(128, b, [&](double x) { return std::cos(2 * pi * x / b); });
        EXPECT_NEAR(g.norm_squared(phi), 2 * pi * pi / b, 1e-3 * 2 * pi * pi / b);
    }
}

TEST(SecondVariation, GramIncludesCurvatureMass) {
    // constant phi on a curved graph: ||1||~^2 = int H^2 ds
    const GraphCurve c = GraphCurve::sample(1.0, 64, [](double x) { return 0.05 * std::sin(2 * pi * x); });
    const TildeGram g = assemble_tilde_gram(c, Restriction::none);
    const std::vector<double> one(64, 1.0);
    const auto k = curvature(c);
    const auto w = g.weights();
    double expected = 0.0;
    for (std::size_t i = 0; i < 64; ++i) expected += w[i] * k[i] * k[i];
    EXPECT_NEAR(g.norm_squared(one), expected, 1e-10 * expected);
    EXPECT_TRUE(g.positive_definite());
}

TEST(SecondVariation, SegmentConstantGivesEndpointTerms) {
    for (auto [h1, h2] : {std::pair{1.0, 1.0}, std::pair{-1.0, -1.0}, std::pair{0.3, -0.7}}) {
        const TildeGram g = assemble_tilde_gram(SegmentConfig{1.0, h1, h2}, 32, Restriction::none);
        const std::vector<double> one(32, 1.0);
        EXPECT_NEAR(g.norm_squared(one), -h1 - h2, 1e-12);
        const TOperator zero = TOperator::zero(g);
        EXPECT_TRUE(zero.is_zero());
        EXPECT_NEAR(second_variation_value(zero, one).value(), -h1 - h2, 1e-12);
    }
}

TEST(SecondVariation, RestrictionBases) {
    const GraphCurve c = GraphCurve::flat(1.0, 16).with_endpoint(0);
    const TildeGram mz = assemble_tilde_gram(c, Restriction::mean_zero);
    EXPECT_EQ(mz.basis().cols(), 15);
    const Eigen::VectorXd means = mz.basis().transpose() * mz.weights();
    EXPECT_LT(means.cwiseAbs().maxCoeff(), 1e-14);
    const TildeGram ez = assemble_tilde_gram(c, Restriction::endpoint_zero);
    EXPECT_EQ(ez.basis().cols(), 15);
    EXPECT_EQ(ez.basis().row(0).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_TRUE(ez.positive_definite());
    const TildeGram seg = assemble_tilde_gram(SegmentConfig{1.0, 0.0, 0.0}, 16, Restriction::endpoint_zero);
    EXPECT_EQ(seg.basis().cols(), 14);
}

TEST(SecondVariation, ErrorPaths) {
    const GraphCurve flat = GraphCurve::flat(1.0, 16);
    const TildeGram none = assemble_tilde_gram(flat, Restriction::none);
    EXPECT_FALSE(none.positive_definite());
    try {
        (void)none.solve(Eigen::VectorXd::Ones(16));
        FAIL() << "expected GramSingular";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::GramSingular);
    }
    try {
        (void)assemble_tilde_gram(flat, Restriction::endpoint_zero);
        FAIL() << "expected InvalidRestriction";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidRestriction);
    }
    EXPECT_THROW((void)parse_restriction("mean-zero"), Error);
    EXPECT_EQ(parse_restriction("endpoint_zero"), Restriction::endpoint_zero);
    EXPECT_EQ(to_string(Restriction::mean_zero), "mean_zero");
}

TEST(SecondVariation, OperatorIsSymmetricAndPositive) {
    std::mt19937_64 rng(7);
    const Fixture s = make_setup(example_strip(), GraphCurve::sample(1.0, 32, [](double x) {
                                   return 0.05 * std::sin(2 * pi * x);
                               }), 32);
    for (int k = 0; k < 5; ++k) {
        const auto p = random_phi(rng, 32), q = random_phi(rng, 32);
        const double pq = s.op.form(p, q), qp = s.op.form(q, p);
        EXPECT_NEAR(pq, qp, 1e-8 * std::max(1.0, std::abs(pq)));
        EXPECT_GE(s.op.form(p, p), -1e-10);
        const auto v = s.op.jump_source(p);
        ASSERT_TRUE(v.has_value());
        EXPECT_NEAR(s.op.form(p, p), 2.0 * dirichlet_energy(*v), 1e-8 * std::max(1.0, s.op.form(p, p)));
    }
}

TEST(SecondVariation, TwoRoutesAgree) {
    std::mt19937_64 rng(11);
    const Fixture s = flat_setup(32);
    for (int k = 0; k < 5; ++k) {
        const auto p = random_phi(rng, 32);
        const SecondVariationValue v = second_variation_value(s.op, p);
        EXPECT_LE(v.mismatch(), 1e-6);
    }
}

TEST(SecondVariation, CosineModesDiagonalize) {
    const Fixture s = flat_setup(64);
    const auto c2 = sample(64, 1.0, [](double x) { return std::cos(2 * pi * x); });
    const auto c4 = sample(64, 1.0, [](double x) { return std::cos(4 * pi * x); });
    const auto s2 = sample(64, 1.0, [](double x) { return std::sin(2 * pi * x); });
    const double scale = s.op.form(c2, c2);
    EXPECT_LT(std::abs(s.op.form(c2, c4)), 1e-8 * scale);
    EXPECT_LT(std::abs(s.op.form(c2, s2)), 1e-8 * scale);
    EXPECT_NEAR(rayleigh_quotient(s.op, c2), rayleigh_quotient(s.op, s2), 1e-6);
    // T cos = lambda cos
    const auto t = s.op.apply(c2);
    const double lam = rayleigh_quotient(s.op, c2);
    for (std::size_t i = 0; i < 64; ++i) EXPECT_NEAR(t[i], lam * c2[i], 1e-6);
}

TEST(SecondVariation, LeadingEigenvalues) {
    const Fixture s = flat_setup(64);
    const EigenResult l1 = lambda1(s.op);
    EXPECT_NEAR(l1.value, lambda1_strip(1.0, 1.0), 0.02 * lambda1_strip(1.0, 1.0));
    EXPECT_LE(l1.last_change, 1e-8);
    const auto pairs = leading_eigenpairs(s.op, 3);
    ASSERT_EQ(pairs.size(), 3u);
    EXPECT_NEAR(pairs[0].value, l1.value, 1e-7);
    EXPECT_NEAR(pairs[1].value, l1.value, 1e-6);  // cos and sin share the eigenvalue
    EXPECT_NEAR(pairs[2].value, mode_lambda(4, 1.0, 1.0), 0.02 * mode_lambda(4, 1.0, 1.0));
    EXPECT_NEAR(s.op.gram().norm_squared(l1.vector), 1.0, 1e-10);
}

TEST(SecondVariation, EigenSolveIsSeedDeterministic) {
    const Fixture s = flat_setup(32);
    const EigenResult a = lambda1(s.op), b = lambda1(s.op);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.iterations, b.iterations);
    EigenOptions other;
    other.seed = 12345;
    EXPECT_NEAR(lambda1(s.op, other).value, a.value, 1e-7);
}

TEST(SecondVariation, DualEigenvalueInvertsLambda) {
    for (auto [a, b] : {std::pair{1.0, 1.0}, std::pair{1.0, 2.0}}) {
        const Fixture s = flat_setup(32, a, b);
        const double l1 = lambda1(s.op).value;
        const MuResult m = mu(s.op);
        ASSERT_FALSE(m.infinite);
        EXPECT_NEAR(m.value * l1, 1.0, 1e-6);
        EXPECT_EQ(l1 < 1.0, m.value > 1.0);
    }
}

TEST(SecondVariation, ZeroOperatorHasInfiniteMu) {
    const TildeGram g = assemble_tilde_gram(SegmentConfig{1.0, 1.0, 1.0}, 16, Restriction::none);
    const MuResult m = mu(TOperator::zero(g));
    EXPECT_TRUE(m.infinite);
    EXPECT_TRUE(std::isinf(m.value));
    EXPECT_EQ(lambda1(TOperator::zero(assemble_tilde_gram(SegmentConfig{1.0, -1.0, -1.0}, 16, Restriction::none)))
                  .value,
              0.0);
}

TEST(SecondVariation, VerdictRule) {
    EXPECT_EQ(classify_lambda1(0.97), Verdict::strictly_stable);
    EXPECT_EQ(classify_lambda1(1.03), Verdict::unstable);
    EXPECT_EQ(classify_lambda1(1.0), Verdict::marginal);
    EXPECT_EQ(classify_lambda1(0.99), Verdict::marginal);
    EXPECT_EQ(classify_lambda1(0.99, 0.005), Verdict::strictly_stable);
    EXPECT_EQ(classify_coercivity(0.5), Verdict::strictly_stable);
    EXPECT_EQ(classify_coercivity(-0.5), Verdict::unstable);
    EXPECT_EQ(classify_coercivity(0.0), Verdict::marginal);
    EXPECT_EQ(to_string(Verdict::strictly_stable), "strictly_stable");
}
