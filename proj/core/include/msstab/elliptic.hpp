#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "msstab/geometry.hpp"

namespace msstab {

/// Node counts of the mapped grid. Each component (above and below the curve)
/// gets nx columns (periodic, one per curve node) and ny cell layers between
/// the curve and its wall, i.e. ny+1 node rows of which the last is Dirichlet.
struct Grid {
    static constexpr std::size_t min_nodes = 16;

    std::size_t nx = 128;
    std::size_t ny = 128;

    void validate() const;
    /// nx must match the curve's node count: the curve is a grid line.
    void require_compatible(const GraphCurve& curve) const;
};

struct SolverOptions {
    double rel_tol = 1e-10;
    double max_iter_factor = 50.0;  // max iterations = factor * nx * ny
};

struct SolveStats {
    std::size_t iterations = 0;
    double residual = 0.0;
    double tolerance = 0.0;

    /// Combines the stats of two independent solves (sum of work, worst residual).
    void merge(const SolveStats& other);
};

enum class Side { plus, minus };
enum class Region { whole, plus, minus };

/// Piecewise-H^1 field on the strip minus the curve. Each component stores a
/// drift slope s and the periodic correction w on its own node rows, so the
/// represented function is s*x + w. Row j = 0 sits on the curve and carries the
/// one-sided trace of that component; the two sides never share values.
///
/// Node (i, j) of component plus lies at y = psi_i + (a - psi_i) j/ny, of
/// component minus at y = psi_i - (a + psi_i) j/ny.
class SlitField {
public:
    SlitField(double half_height, GraphCurve curve, Grid grid);

    [[nodiscard]] double half_height() const noexcept { return half_height_; }
    [[nodiscard]] const GraphCurve& curve() const noexcept { return curve_; }
    [[nodiscard]] const Grid& grid() const noexcept { return grid_; }

    [[nodiscard]] double slope(Side side) const noexcept;
    void set_slope(Side side, double slope) noexcept;

    [[nodiscard]] std::span<double> values(Side side) noexcept;
    [[nodiscard]] std::span<const double> values(Side side) const noexcept;
    [[nodiscard]] std::size_t index(std::size_t i, std::size_t j) const noexcept { return j * grid_.nx + i; }

    [[nodiscard]] double node_x(std::size_t i) const noexcept { return curve_.x(i); }
    [[nodiscard]] double node_y(Side side, std::size_t i, std::size_t j) const noexcept;
    /// Full value s*x_i + w at node (i, j).
    [[nodiscard]] double value(Side side, std::size_t i, std::size_t j) const noexcept;

    [[nodiscard]] std::vector<double> traces(Side side) const;
    /// u+ - u- at the curve nodes.
    [[nodiscard]] std::vector<double> jumps() const;
    /// Increment of the trace along each chord [x_i, x_{i+1}], drift included.
    [[nodiscard]] std::vector<double> segment_increments(Side side) const;
    /// Tangential derivative of the trace at the nodes (mean of the two adjacent chords).
    [[nodiscard]] std::vector<double> tangential_gradient(Side side) const;

    SlitField& operator+=(const SlitField& other);
    SlitField& operator*=(double factor);

private:
    double half_height_;
    GraphCurve curve_;
    Grid grid_;
    double slope_plus_ = 0.0;
    double slope_minus_ = 0.0;
    std::vector<double> plus_;
    std::vector<double> minus_;
};

/// P1 finite-element solver for harmonic fields on the two components of the
/// strip minus the curve. Assembly and preconditioner setup are done once per
/// (curve, grid); every solve after that is one CG run per component.
class SlitSolver {
public:
    SlitSolver(double half_height, const GraphCurve& curve, const Grid& grid, SolverOptions options = {});
    ~SlitSolver();
    SlitSolver(SlitSolver&&) noexcept;
    SlitSolver& operator=(SlitSolver&&) noexcept;
    SlitSolver(const SlitSolver&) = delete;
    SlitSolver& operator=(const SlitSolver&) = delete;

    [[nodiscard]] double half_height() const noexcept;
    [[nodiscard]] const GraphCurve& curve() const noexcept;
    [[nodiscard]] const Grid& grid() const noexcept;

    /// Harmonic field with the strip's Dirichlet data on y = +-a, homogeneous
    /// Neumann data on both sides of the curve and b-periodic x-derivative.
    [[nodiscard]] std::pair<SlitField, SolveStats> solve_state(const StripDomain& domain) const;

    /// Field v_phi: zero on y = +-a, periodic, harmonic in each component, with
    /// d_nu v^+ = div_G(phi grad_G u^+) and d_nu v^- = div_G(phi grad_G u^-) on
    /// the curve (nu pointing into the upper component). Imposed weakly:
    ///   int grad v . grad z = int_G phi (d_s z^+ d_s u^+ - d_s z^- d_s u^-) ds.
    [[nodiscard]] std::pair<SlitField, SolveStats> solve_jump_source(const SlitField& state,
                                                                     std::span<const double> phi) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

std::pair<SlitField, SolveStats> solve_state(const StripDomain& domain, const GraphCurve& curve, const Grid& grid,
                                             const SolverOptions& options = {});

std::pair<SlitField, SolveStats> solve_jump_source(const StripDomain& domain, const GraphCurve& curve,
                                                   const SlitField& state, std::span<const double> phi,
                                                   const Grid& grid, const SolverOptions& options = {});

/// Bilinear coupling of a trace direction phi with a field z:
///   B(phi, z) = int_G phi (d_s z^+ d_s u^+ - d_s z^- d_s u^-) ds
/// with P1 traces on the chords. solve_jump_source computes K^{-1} B(phi, .).
double jump_source_pairing(const SlitField& state, std::span<const double> phi, const SlitField& z);

/// Gradient of B(., z) with respect to the nodal values of phi.
std::vector<double> jump_source_adjoint(const SlitField& state, const SlitField& z);

/// int |grad v|^2 over the chosen component(s), exact for the P1 field, drift included.
double dirichlet_energy(const SlitField& field, Region region = Region::whole);

}  // namespace msstab
