#include "msstab/analytic_oracle.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <string>

#include "msstab/error.hpp"

namespace msstab {

namespace {

void require_even(int n) {
    require(n >= 2, ErrorCode::OddMode, "mode index must be an even integer >= 2, got " + std::to_string(n));
    require(n % 2 == 0, ErrorCode::OddMode, "periodic modes need an even index, got " + std::to_string(n));
}

}  // namespace

double mode_lambda(int n, double half_height, double period) {
    require_even(n);
    require(half_height > 0.0 && period > 0.0, ErrorCode::InvalidArgument, "a and b must be positive");
    const double k = n * std::numbers::pi / period;
    const double scale = 4.0 / k;
    const double arg = k * half_height;
    // tanh is 1 to double precision past 20
    return arg > 20.0 ? scale : scale * std::tanh(arg);
}

double lambda1_strip(double half_height, double period) { return mode_lambda(2, half_height, period); }

SlitField strip_mode_field(int n, double amplitude, double half_height, double period, const Grid& grid) {
    require_even(n);
    SlitField field(half_height, GraphCurve::flat(period, grid.nx), grid);
    const double k = n * std::numbers::pi / period;
    for (Side side : {Side::plus, Side::minus}) {
        auto values = field.values(side);
        for (std::size_t j = 0; j <= grid.ny; ++j) {
            for (std::size_t i = 0; i < grid.nx; ++i) {
                const double y = field.node_y(side, i, j);
                values[field.index(i, j)] =
                    amplitude * std::sin(k * field.node_x(i)) * std::sinh(k * (half_height - std::abs(y)));
            }
        }
    }
    return field;
}

double strip_mode_neumann_trace(int n, double amplitude, double half_height, double period, double x) {
    require_even(n);
    const double k = n * std::numbers::pi / period;
    return -amplitude * k * std::cosh(k * half_height) * std::sin(k * x);
}

double segment_min_eig(double length, double h1, double h2, std::size_t nodes) {
    require(nodes >= 16, ErrorCode::InvalidArgument, "segment_min_eig needs at least 16 nodes");
    SegmentConfig{length, h1, h2}.validate();
    const auto m = static_cast<Eigen::Index>(nodes);
    const double h = length / static_cast<double>(nodes - 1);
    Eigen::MatrixXd stiff = Eigen::MatrixXd::Zero(m, m);
    Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i + 1 < m; ++i) {
        stiff(i, i) += 1.0 / h;
        stiff(i + 1, i + 1) += 1.0 / h;
        stiff(i, i + 1) -= 1.0 / h;
        stiff(i + 1, i) -= 1.0 / h;
        // consistent P1 mass
        mass(i, i) += h / 3.0;
        mass(i + 1, i + 1) += h / 3.0;
        mass(i, i + 1) += h / 6.0;
        mass(i + 1, i) += h / 6.0;
    }
    Eigen::MatrixXd form = stiff;
    form(0, 0) -= h1;
    form(m - 1, m - 1) -= h2;
    const Eigen::MatrixXd h1_norm = mass + stiff;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(form, h1_norm, Eigen::EigenvaluesOnly);
    require(solver.info() == Eigen::Success, ErrorCode::NoConvergence, "dense generalized eigensolve failed");
    return solver.eigenvalues().minCoeff();
}

}  // namespace msstab
