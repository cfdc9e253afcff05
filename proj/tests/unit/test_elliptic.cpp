#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "support.hpp"

using namespace msstab;
using namespace msstab::testing;

namespace {

// Discrete L2 distance over all node rows, a reference given as a function of (side, x, y).
double l2_error(const SlitField& f, const std::function<double(Side, double, double)>& ref) {
    const Grid& g = f.grid();
    const double hx = f.curve().period() / static_cast<double>(g.nx);
    const double hy = f.half_height() / static_cast<double>(g.ny);
    double sum = 0.0;
    for (Side side : {Side::plus, Side::minus}) {
        for (std::size_t j = 0; j <= g.ny; ++j) {
            for (std::size_t i = 0; i < g.nx; ++i) {
                const double e = f.value(side, i, j) - ref(side, f.node_x(i), f.node_y(side, i, j));
                sum += e * e;
            }
        }
    }
    return std::sqrt(sum * hx * hy);
}

StripDomain cosine_walls() {
    // g = cos(2 pi x) on both walls, no drift
    return StripDomain{1.0, 1.0, BoundaryTrace{0.0, 0.0, {FourierTerm{1, 1.0, 0.0}}},
                       BoundaryTrace{0.0, 0.0, {FourierTerm{1, 1.0, 0.0}}}};
}

double cosine_state_error(std::size_t n) {
    const Grid grid{n, n};
    const auto [u, stats] = solve_state(cosine_walls(), GraphCurve::flat(1.0, n), grid);
    const double k = 2 * pi;
    return l2_error(u, [&](Side, double x, double y) { return std::cos(k * x) * std::cosh(k * y) / std::cosh(k); });
}

double mode_field_error(int mode, std::size_t n) {
    const StripDomain d = example_strip();
    const Grid grid{n, n};
    const GraphCurve c = GraphCurve::flat(1.0, n);
    const auto [u, s] = solve_state(d, c, grid);
    const auto phi = sample(n, 1.0, [&](double x) { return std::cos(mode * pi * x); });
    const auto [v, s2] = solve_jump_source(d, c, u, phi, grid);
    const double k = mode * pi;
    return l2_error(v, [&](Side, double x, double y) {
        return std::sin(k * x) * std::sinh(k * (1.0 - std::abs(y))) / std::cosh(k);
    });
}

}  // namespace

TEST(Elliptic, ExampleStateIsReproducedExactly) {
    const StripDomain d = example_strip();
    const Grid grid{32, 32};
    const auto [u, stats] = solve_state(d, GraphCurve::flat(1.0, 32), grid);
    EXPECT_LE(stats.residual, stats.tolerance);
    for (std::size_t j = 0; j <= grid.ny; ++j) {
        for (std::size_t i = 0; i < grid.nx; ++i) {
            const double x = u.node_x(i);
            EXPECT_NEAR(u.value(Side::plus, i, j), x + 1.0, 1e-8);
            EXPECT_NEAR(u.value(Side::minus, i, j), -x, 1e-8);
        }
    }
    const auto jumps = u.jumps();
    for (std::size_t i = 0; i < grid.nx; ++i) EXPECT_NEAR(jumps[i], 2.0 * u.node_x(i) + 1.0, 1e-8);
    for (double g : u.tangential_gradient(Side::plus)) EXPECT_NEAR(g, 1.0, 1e-8);
    for (double g : u.tangential_gradient(Side::minus)) EXPECT_NEAR(g, -1.0, 1e-8);
}

TEST(Elliptic, ConstantDataStayExactOnCurvedMesh) {
    // constants satisfy the Neumann condition on any curve
    const StripDomain d{1.0, 1.0, BoundaryTrace{0.0, 2.5, {}}, BoundaryTrace{0.0, -0.5, {}}};
    const GraphCurve c = GraphCurve::sample(1.0, 32, [](double x) { return 0.1 * std::sin(2 * pi * x); });
    const auto [u, stats] = solve_state(d, c, Grid{32, 32});
    for (double v : u.values(Side::plus)) EXPECT_NEAR(v, 2.5, 1e-8);
    for (double v : u.values(Side::minus)) EXPECT_NEAR(v, -0.5, 1e-8);
    EXPECT_NEAR(dirichlet_energy(u), 0.0, 1e-12);
}

TEST(Elliptic, ZeroDataGiveZeroField) {
    const StripDomain d{1.0, 1.0, BoundaryTrace{}, BoundaryTrace{}};
    const auto [u, stats] = solve_state(d, GraphCurve::flat(1.0, 16), Grid{16, 16});
    for (Side s : {Side::plus, Side::minus}) {
        for (double v : u.values(s)) EXPECT_EQ(v, 0.0);
    }
    EXPECT_EQ(dirichlet_energy(u), 0.0);
}

TEST(Elliptic, CosineStateConvergesAtSecondOrder) {
    const double e32 = cosine_state_error(32), e64 = cosine_state_error(64), e128 = cosine_state_error(128);
    EXPECT_LT(e128, 1e-3);
    EXPECT_GE(std::log2(e32 / e64), 1.8);
    EXPECT_GE(std::log2(e64 / e128), 1.8);
}

TEST(Elliptic, JumpSourceMatchesSeparatedSolution) {
    for (int n : {2, 4}) {
        const double e32 = mode_field_error(n, 32), e64 = mode_field_error(n, 64);
        EXPECT_LT(e64, 5e-3) << "n=" << n;
        EXPECT_GE(std::log2(e32 / e64), 1.8) << "n=" << n;
    }
}

TEST(Elliptic, OracleFieldAgreesWithReference) {
    const SlitField f = strip_mode_field(2, 0.5, 1.0, 1.0, Grid{16, 16});
    const double k = 2 * pi;
    EXPECT_NEAR(f.value(Side::plus, 3, 4), 0.5 * std::sin(k * 3 / 16.0) * std::sinh(k * 0.75), 1e-12);
    EXPECT_NEAR(f.value(Side::minus, 3, 4), f.value(Side::plus, 3, 4), 1e-15);
}

TEST(Elliptic, JumpSourceIsLinearInPhi) {
    const StripDomain d = example_strip();
    const Grid grid{32, 32};
    const GraphCurve c = GraphCurve::sample(1.0, 32, [](double x) { return 0.05 * std::cos(2 * pi * x); });
    const SlitSolver solver(1.0, c, grid);
    const auto [u, s] = solver.solve_state(d);
    const auto p1 = sample(32, 1.0, [](double x) { return std::sin(2 * pi * x); });
    const auto p2 = sample(32, 1.0, [](double x) { return x * (1 - x); });
    std::vector<double> combo(32);
    for (std::size_t i = 0; i < 32; ++i) combo[i] = p1[i] - 3.0 * p2[i];
    auto [v1, a] = solver.solve_jump_source(u, p1);
    auto [v2, b] = solver.solve_jump_source(u, p2);
    const auto [vc, c2] = solver.solve_jump_source(u, combo);
    v2 *= -3.0;
    v1 += v2;
    for (Side side : {Side::plus, Side::minus}) {
        const std::span<const double> x = v1.values(side), y = vc.values(side);
        for (std::size_t k = 0; k < x.size(); ++k) EXPECT_NEAR(x[k], y[k], 1e-8);
    }
}

TEST(Elliptic, MaximumPrinciple) {
    const StripDomain d{1.0, 1.0, BoundaryTrace{0.0, 0.2, {FourierTerm{1, 0.3, 0.4}}},
                        BoundaryTrace{0.0, -0.1, {FourierTerm{2, 0.5, 0.0}}}};
    const GraphCurve c = GraphCurve::sample(1.0, 32, [](double x) { return 0.1 * std::sin(2 * pi * x); });
    const auto [u, s] = solve_state(d, c, Grid{32, 32});
    for (auto [side, trace] : {std::pair{Side::plus, d.top}, std::pair{Side::minus, d.bottom}}) {
        double lo = 1e300, up = -1e300;
        for (std::size_t i = 0; i < 32; ++i) {
            const double g = trace.value(u.node_x(i), 1.0);
            lo = std::min(lo, g);
            up = std::max(up, g);
        }
        for (double v : u.values(side)) {
            EXPECT_GE(v, lo - 1e-9);
            EXPECT_LE(v, up + 1e-9);
        }
    }
}

TEST(Elliptic, ComponentsDecouple) {
    const StripDomain d{1.0, 1.0, BoundaryTrace{0.0, 0.0, {FourierTerm{1, 1.0, 0.0}}}, BoundaryTrace{}};
    const auto [u, s] = solve_state(d, GraphCurve::flat(1.0, 16), Grid{16, 16});
    for (double v : u.values(Side::minus)) EXPECT_EQ(v, 0.0);
    EXPECT_GT(dirichlet_energy(u, Region::plus), 0.0);
    EXPECT_EQ(dirichlet_energy(u, Region::minus), 0.0);
}

TEST(Elliptic, DirichletEnergies) {
    const auto [u, s] = solve_state(example_strip(1.0, 1.0), GraphCurve::flat(1.0, 16), Grid{16, 16});
    EXPECT_NEAR(dirichlet_energy(u), 2.0, 1e-9);  // |grad u|^2 = 1 on area 2ab
    EXPECT_NEAR(dirichlet_energy(u, Region::plus), 1.0, 1e-9);

    // cos(kx) cosh(ky)/cosh(ka) on one component: k tanh(ka) b/2
    const auto [w, s2] = solve_state(cosine_walls(), GraphCurve::flat(1.0, 128), Grid{128, 128});
    const double k = 2 * pi;
    EXPECT_NEAR(dirichlet_energy(w, Region::plus), k * std::tanh(k) / 2.0, 1e-2 * k / 2.0);
    EXPECT_NEAR(dirichlet_energy(w), 2.0 * dirichlet_energy(w, Region::plus), 1e-9);
}

TEST(Elliptic, PairingIsSymmetricAndMatchesAdjoint) {
    const StripDomain d = example_strip();
    const Grid grid{32, 32};
    const GraphCurve c = GraphCurve::flat(1.0, 32);
    const auto [u, s] = solve_state(d, c, grid);
    const auto p = sample(32, 1.0, [](double x) { return std::cos(2 * pi * x) + 0.3 * std::sin(6 * pi * x); });
    const auto q = sample(32, 1.0, [](double x) { return std::sin(4 * pi * x); });
    const auto [vp, a] = solve_jump_source(d, c, u, p, grid);
    const auto [vq, b] = solve_jump_source(d, c, u, q, grid);
    const double bpq = jump_source_pairing(u, p, vq);
    const double bqp = jump_source_pairing(u, q, vp);
    EXPECT_NEAR(bpq, bqp, 1e-8 * std::max(1.0, std::abs(bpq)));
    const auto adj = jump_source_adjoint(u, vq);
    double dot = 0.0;
    for (std::size_t i = 0; i < 32; ++i) dot += adj[i] * p[i];
    EXPECT_NEAR(dot, bpq, 1e-12 * std::max(1.0, std::abs(bpq)));
    // int |grad v_p|^2 = B(p, v_p)
    EXPECT_NEAR(dirichlet_energy(vp), jump_source_pairing(u, p, vp), 1e-8);
}

TEST(Elliptic, GridMustMatchCurve) {
    EXPECT_THROW((Grid{8, 8}).validate(), Error);
    EXPECT_THROW((void)solve_state(example_strip(), GraphCurve::flat(1.0, 16), Grid{32, 32}), Error);
}
