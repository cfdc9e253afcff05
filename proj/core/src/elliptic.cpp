#include "msstab/elliptic.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <array>
#include <cmath>
#include <string>

#include "msstab/error.hpp"

namespace msstab {

namespace {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplets = std::vector<Eigen::Triplet<double>>;
using CgSolver = Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper,
                                          Eigen::DiagonalPreconditioner<double>>;

double mapped_y(double half_height, double psi, Side side, std::size_t j, std::size_t ny) {
    const double s = static_cast<double>(j) / static_cast<double>(ny);
    return side == Side::plus ? psi + (half_height - psi) * s : psi - (half_height + psi) * s;
}

struct Triangle {
    std::array<std::size_t, 3> node{};
    std::array<double, 3> x{};
    std::array<double, 3> y{};
};

struct P1Element {
    double area = 0.0;
    std::array<std::array<double, 2>, 3> grad{};
};

P1Element p1_element(const Triangle& t) {
    const double det = (t.x[1] - t.x[0]) * (t.y[2] - t.y[0]) - (t.x[2] - t.x[0]) * (t.y[1] - t.y[0]);
    P1Element e;
    e.area = 0.5 * std::abs(det);
    e.grad[0] = {(t.y[1] - t.y[2]) / det, (t.x[2] - t.x[1]) / det};
    e.grad[1] = {(t.y[2] - t.y[0]) / det, (t.x[0] - t.x[2]) / det};
    e.grad[2] = {(t.y[0] - t.y[1]) / det, (t.x[1] - t.x[0]) / det};
    return e;
}

// Each mapped cell (i..i+1, j..j+1) is split along the (i,j)-(i+1,j+1) diagonal.
// Both components use the same index pattern, so the minus mesh is the mirror
// image of the plus mesh of the reflected curve.
template <typename Visit>
void for_each_triangle(double half_height, const GraphCurve& curve, const Grid& grid, Side side, Visit&& visit) {
    const std::size_t nx = grid.nx;
    const std::size_t ny = grid.ny;
    const double h = curve.spacing();
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            const std::size_t ip = (i + 1) % nx;
            const double x0 = static_cast<double>(i) * h;
            const double x1 = x0 + h;
            const double p0 = curve.height(i);
            const double p1 = curve.height(ip);
            const std::size_t a = j * nx + i, b = j * nx + ip, c = (j + 1) * nx + ip, d = (j + 1) * nx + i;
            const double ya = mapped_y(half_height, p0, side, j, ny);
            const double yb = mapped_y(half_height, p1, side, j, ny);
            const double yc = mapped_y(half_height, p1, side, j + 1, ny);
            const double yd = mapped_y(half_height, p0, side, j + 1, ny);
            visit(Triangle{{a, b, c}, {x0, x1, x1}, {ya, yb, yc}});
            visit(Triangle{{a, c, d}, {x0, x1, x0}, {ya, yc, yd}});
        }
    }
}

// Free unknowns are the rows j < ny; the wall row j = ny is Dirichlet.
struct ComponentSystem {
    std::size_t free_count = 0;
    SparseMatrix stiffness;       // free x free
    SparseMatrix wall_coupling;   // free x wall
    Eigen::VectorXd drift_load;   // int d_x(lambda_a) over the component, free rows
    CgSolver cg;

    ComponentSystem(double half_height, const GraphCurve& curve, const Grid& grid, Side side,
                    const SolverOptions& options) {
        const std::size_t nx = grid.nx;
        free_count = nx * grid.ny;
        Triplets kff, kfd;
        kff.reserve(free_count * 7);
        kfd.reserve(nx * 4);
        drift_load = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(free_count));
        for_each_triangle(half_height, curve, grid, side, [&](const Triangle& t) {
            const P1Element e = p1_element(t);
            for (int p = 0; p < 3; ++p) {
                const std::size_t row = t.node[p];
                if (row >= free_count) continue;
                drift_load[static_cast<Eigen::Index>(row)] += e.area * e.grad[p][0];
                for (int q = 0; q < 3; ++q) {
                    const double k = e.area * (e.grad[p][0] * e.grad[q][0] + e.grad[p][1] * e.grad[q][1]);
                    const std::size_t col = t.node[q];
                    if (col < free_count) {
                        kff.emplace_back(static_cast<int>(row), static_cast<int>(col), k);
                    } else {
                        kfd.emplace_back(static_cast<int>(row), static_cast<int>(col - free_count), k);
                    }
                }
            }
        });
        stiffness.resize(static_cast<Eigen::Index>(free_count), static_cast<Eigen::Index>(free_count));
        stiffness.setFromTriplets(kff.begin(), kff.end());
        wall_coupling.resize(static_cast<Eigen::Index>(free_count), static_cast<Eigen::Index>(nx));
        wall_coupling.setFromTriplets(kfd.begin(), kfd.end());

        cg.setTolerance(options.rel_tol);
        cg.setMaxIterations(static_cast<Eigen::Index>(options.max_iter_factor * static_cast<double>(grid.nx) *
                                                      static_cast<double>(grid.ny)));
        cg.compute(stiffness);
    }

    Eigen::VectorXd solve(const Eigen::VectorXd& rhs, SolveStats& stats) const {
        Eigen::VectorXd x = cg.solve(rhs);
        SolveStats local{static_cast<std::size_t>(cg.iterations()), cg.error(), cg.tolerance()};
        if (cg.info() != Eigen::Success || !x.allFinite()) {
            fail(ErrorCode::SolverDiverged, "CG stopped after " + std::to_string(local.iterations) +
                                                " iterations with relative residual " +
                                                std::to_string(local.residual) + " (tolerance " +
                                                std::to_string(local.tolerance) + ")");
        }
        stats.merge(local);
        return x;
    }
};

}  // namespace

void Grid::validate() const {
    require(nx >= min_nodes && ny >= min_nodes, ErrorCode::InvalidArgument,
            "grid needs nx, ny >= " + std::to_string(min_nodes));
}

void Grid::require_compatible(const GraphCurve& curve) const {
    validate();
    require(curve.size() == nx, ErrorCode::InvalidArgument,
            "grid nx (" + std::to_string(nx) + ") must equal the curve node count (" + std::to_string(curve.size()) +
                ")");
}

void SolveStats::merge(const SolveStats& other) {
    iterations += other.iterations;
    residual = std::max(residual, other.residual);
    tolerance = std::max(tolerance, other.tolerance);
}

SlitField::SlitField(double half_height, GraphCurve curve, Grid grid)
    : half_height_(half_height),
      curve_(std::move(curve)),
      grid_(grid),
      plus_(grid.nx * (grid.ny + 1), 0.0),
      minus_(grid.nx * (grid.ny + 1), 0.0) {
    grid_.require_compatible(curve_);
    curve_.require_inside(half_height_);
}

double SlitField::slope(Side side) const noexcept { return side == Side::plus ? slope_plus_ : slope_minus_; }

void SlitField::set_slope(Side side, double slope) noexcept {
    (side == Side::plus ? slope_plus_ : slope_minus_) = slope;
}

std::span<double> SlitField::values(Side side) noexcept { return side == Side::plus ? plus_ : minus_; }

std::span<const double> SlitField::values(Side side) const noexcept {
    return side == Side::plus ? plus_ : minus_;
}

double SlitField::node_y(Side side, std::size_t i, std::size_t j) const noexcept {
    return mapped_y(half_height_, curve_.height(i), side, j, grid_.ny);
}

double SlitField::value(Side side, std::size_t i, std::size_t j) const noexcept {
    return slope(side) * node_x(i) + values(side)[index(i, j)];
}

std::vector<double> SlitField::traces(Side side) const {
    std::vector<double> out(grid_.nx);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = value(side, i, 0);
    return out;
}

std::vector<double> SlitField::jumps() const {
    auto out = traces(Side::plus);
    const auto lower = traces(Side::minus);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= lower[i];
    return out;
}

std::vector<double> SlitField::segment_increments(Side side) const {
    const std::size_t nx = grid_.nx;
    const auto w = values(side);
    const double drift = slope(side) * curve_.spacing();
    std::vector<double> out(nx);
    for (std::size_t i = 0; i < nx; ++i) out[i] = w[(i + 1) % nx] - w[i] + drift;
    return out;
}

std::vector<double> SlitField::tangential_gradient(Side side) const {
    const auto inc = segment_increments(side);
    const auto len = chord_lengths(curve_);
    const std::size_t n = inc.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t prev = (i + n - 1) % n;
        out[i] = 0.5 * (inc[prev] / len[prev] + inc[i] / len[i]);
    }
    return out;
}

SlitField& SlitField::operator+=(const SlitField& other) {
    require(other.plus_.size() == plus_.size(), ErrorCode::InvalidArgument, "field layouts differ");
    slope_plus_ += other.slope_plus_;
    slope_minus_ += other.slope_minus_;
    for (std::size_t k = 0; k < plus_.size(); ++k) {
        plus_[k] += other.plus_[k];
        minus_[k] += other.minus_[k];
    }
    return *this;
}

SlitField& SlitField::operator*=(double factor) {
    slope_plus_ *= factor;
    slope_minus_ *= factor;
    for (double& v : plus_) v *= factor;
    for (double& v : minus_) v *= factor;
    return *this;
}

struct SlitSolver::Impl {
    double half_height;
    GraphCurve curve;
    Grid grid;
    ComponentSystem plus;
    ComponentSystem minus;

    Impl(double a, const GraphCurve& c, const Grid& g, const SolverOptions& options)
        : half_height(a),
          curve(c),
          grid(g),
          plus(a, c, g, Side::plus, options),
          minus(a, c, g, Side::minus, options) {}

    const ComponentSystem& system(Side side) const { return side == Side::plus ? plus : minus; }
};

SlitSolver::SlitSolver(double half_height, const GraphCurve& curve, const Grid& grid, SolverOptions options) {
    require(half_height > 0.0, ErrorCode::InvalidArgument, "half height must be positive");
    grid.require_compatible(curve);
    curve.require_inside(half_height);
    require(options.rel_tol > 0.0 && options.max_iter_factor > 0.0, ErrorCode::InvalidArgument,
            "solver tolerance and iteration factor must be positive");
    impl_ = std::make_unique<Impl>(half_height, curve, grid, options);
}

SlitSolver::~SlitSolver() = default;
SlitSolver::SlitSolver(SlitSolver&&) noexcept = default;
SlitSolver& SlitSolver::operator=(SlitSolver&&) noexcept = default;

double SlitSolver::half_height() const noexcept { return impl_->half_height; }
const GraphCurve& SlitSolver::curve() const noexcept { return impl_->curve; }
const Grid& SlitSolver::grid() const noexcept { return impl_->grid; }

std::pair<SlitField, SolveStats> SlitSolver::solve_state(const StripDomain& domain) const {
    domain.validate();
    require(domain.half_height == impl_->half_height, ErrorCode::InvalidArgument,
            "domain half height differs from the solver's");
    require(domain.period == impl_->curve.period(), ErrorCode::InvalidArgument, "domain period differs from curve");
    SlitField field(impl_->half_height, impl_->curve, impl_->grid);
    SolveStats stats;
    stats.tolerance = 0.0;
    const std::size_t nx = impl_->grid.nx;
    for (Side side : {Side::plus, Side::minus}) {
        const BoundaryTrace& data = side == Side::plus ? domain.top : domain.bottom;
        const ComponentSystem& sys = impl_->system(side);
        Eigen::VectorXd wall(static_cast<Eigen::Index>(nx));
        for (std::size_t i = 0; i < nx; ++i) {
            wall[static_cast<Eigen::Index>(i)] = data.periodic_part(field.node_x(i), domain.period);
        }
        const Eigen::VectorXd rhs = -(sys.wall_coupling * wall) - data.slope * sys.drift_load;
        const Eigen::VectorXd w = sys.solve(rhs, stats);
        auto values = field.values(side);
        for (std::size_t k = 0; k < sys.free_count; ++k) values[k] = w[static_cast<Eigen::Index>(k)];
        for (std::size_t i = 0; i < nx; ++i) values[sys.free_count + i] = wall[static_cast<Eigen::Index>(i)];
        field.set_slope(side, data.slope);
    }
    return {std::move(field), stats};
}

std::pair<SlitField, SolveStats> SlitSolver::solve_jump_source(const SlitField& state,
                                                               std::span<const double> phi) const {
    const std::size_t nx = impl_->grid.nx;
    require(phi.size() == nx, ErrorCode::InvalidArgument, "phi must have one sample per curve node");
    require(state.grid().nx == nx && state.grid().ny == impl_->grid.ny, ErrorCode::InvalidArgument,
            "state was solved on a different grid");
    const auto len = chord_lengths(impl_->curve);
    SlitField field(impl_->half_height, impl_->curve, impl_->grid);
    SolveStats stats;
    for (Side side : {Side::plus, Side::minus}) {
        const ComponentSystem& sys = impl_->system(side);
        const auto du = state.segment_increments(side);
        const double sign = side == Side::plus ? 1.0 : -1.0;
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sys.free_count));
        for (std::size_t i = 0; i < nx; ++i) {
            const std::size_t ip = (i + 1) % nx;
            const double c = sign * 0.5 * (phi[i] + phi[ip]) * du[i] / len[i];
            rhs[static_cast<Eigen::Index>(i)] -= c;
            rhs[static_cast<Eigen::Index>(ip)] += c;
        }
        const Eigen::VectorXd w = sys.solve(rhs, stats);
        auto values = field.values(side);
        for (std::size_t k = 0; k < sys.free_count; ++k) values[k] = w[static_cast<Eigen::Index>(k)];
    }
    return {std::move(field), stats};
}

std::pair<SlitField, SolveStats> solve_state(const StripDomain& domain, const GraphCurve& curve, const Grid& grid,
                                             const SolverOptions& options) {
    return SlitSolver(domain.half_height, curve, grid, options).solve_state(domain);
}

std::pair<SlitField, SolveStats> solve_jump_source(const StripDomain& domain, const GraphCurve& curve,
                                                   const SlitField& state, std::span<const double> phi,
                                                   const Grid& grid, const SolverOptions& options) {
    return SlitSolver(domain.half_height, curve, grid, options).solve_jump_source(state, phi);
}

double jump_source_pairing(const SlitField& state, std::span<const double> phi, const SlitField& z) {
    const auto adjoint = jump_source_adjoint(state, z);
    require(phi.size() == adjoint.size(), ErrorCode::InvalidArgument, "phi must have one sample per curve node");
    double sum = 0.0;
    for (std::size_t k = 0; k < phi.size(); ++k) sum += phi[k] * adjoint[k];
    return sum;
}

std::vector<double> jump_source_adjoint(const SlitField& state, const SlitField& z) {
    require(state.grid().nx == z.grid().nx, ErrorCode::InvalidArgument, "fields live on different curves");
    const auto len = chord_lengths(state.curve());
    const auto du_plus = state.segment_increments(Side::plus);
    const auto du_minus = state.segment_increments(Side::minus);
    const auto dz_plus = z.segment_increments(Side::plus);
    const auto dz_minus = z.segment_increments(Side::minus);
    const std::size_t n = len.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double c = 0.5 * (dz_plus[i] * du_plus[i] - dz_minus[i] * du_minus[i]) / len[i];
        out[i] += c;
        out[(i + 1) % n] += c;
    }
    return out;
}

double dirichlet_energy(const SlitField& field, Region region) {
    double total = 0.0;
    for (Side side : {Side::plus, Side::minus}) {
        if ((region == Region::plus && side != Side::plus) || (region == Region::minus && side != Side::minus)) {
            continue;
        }
        const auto w = field.values(side);
        const double s = field.slope(side);
        double part = 0.0;
        for_each_triangle(field.half_height(), field.curve(), field.grid(), side, [&](const Triangle& t) {
            const P1Element e = p1_element(t);
            double gx = s, gy = 0.0;
            for (int p = 0; p < 3; ++p) {
                gx += w[t.node[p]] * e.grad[p][0];
                gy += w[t.node[p]] * e.grad[p][1];
            }
            part += e.area * (gx * gx + gy * gy);
        });
        total += part;
    }
    return total;
}

}  // namespace msstab
