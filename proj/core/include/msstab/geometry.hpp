#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace msstab {

/// One Fourier term c*cos(2*pi*k*x/b) + s*sin(2*pi*k*x/b) of a b-periodic profile.
struct FourierTerm {
    int wavenumber = 1;
    double cos_coeff = 0.0;
    double sin_coeff = 0.0;
};

/// Dirichlet datum on one wall of the strip, split into a linear drift and a
/// b-periodic correction: g(x) = slope*x + offset + sum of Fourier terms.
struct BoundaryTrace {
    double slope = 0.0;
    double offset = 0.0;
    std::vector<FourierTerm> terms;

    [[nodiscard]] double periodic_part(double x, double period) const;
    [[nodiscard]] double value(double x, double period) const { return slope * x + periodic_part(x, period); }
};

/// Periodic strip R = [0,b) x (-a,a) with Dirichlet data on y = +-a.
struct StripDomain {
    double half_height = 1.0;
    double period = 1.0;
    BoundaryTrace top;
    BoundaryTrace bottom;

    void validate() const;
};

/// Straight segment crossing the domain, with the signed curvatures of the
/// outer boundary (w.r.t. its exterior normal) at the two endpoints.
struct SegmentConfig {
    double length = 1.0;
    double h1 = 0.0;
    double h2 = 0.0;

    void validate() const;
};

/// Discontinuity curve as a periodic graph y = psi(x) sampled at the uniform
/// abscissae x_i = i*b/m. Optionally one node is marked as an "endpoint" so
/// that the periodic curve can be read as the interval [0,b] with psi(0)=psi(b).
class GraphCurve {
public:
    static constexpr std::size_t min_nodes = 8;

    GraphCurve(double period, std::vector<double> heights, std::optional<std::size_t> endpoint = std::nullopt);

    static GraphCurve flat(double period, std::size_t nodes, double height = 0.0);
    static GraphCurve sample(double period, std::size_t nodes, const std::function<double(double)>& profile);

    [[nodiscard]] double period() const noexcept { return period_; }
    [[nodiscard]] std::size_t size() const noexcept { return heights_.size(); }
    [[nodiscard]] double spacing() const noexcept { return period_ / static_cast<double>(heights_.size()); }
    [[nodiscard]] double x(std::size_t i) const noexcept { return static_cast<double>(i) * spacing(); }
    [[nodiscard]] double height(std::size_t i) const noexcept { return heights_[i]; }
    [[nodiscard]] std::span<const double> heights() const noexcept { return heights_; }
    [[nodiscard]] std::optional<std::size_t> endpoint() const noexcept { return endpoint_; }
    [[nodiscard]] double max_abs_height() const noexcept;
    [[nodiscard]] GraphCurve with_endpoint(std::size_t node) const;

    /// Throws CurveEscapesStrip unless max|psi| < limit.
    void require_inside(double limit) const;

private:
    double period_;
    std::vector<double> heights_;
    std::optional<std::size_t> endpoint_;
};

/// Vertical normal flow on graphs. Near the curve the field is X = psi(x) e_y;
/// it is switched off by cutoff_profile() within cutoff_margin of y = +-a.
struct FlowSpec {
    std::vector<double> direction;
    double cutoff_margin = 0.0;
    std::vector<double> times;

    /// Checks sizes and |t_j| * max|direction| < a - cutoff_margin.
    void validate(const StripDomain& domain, const GraphCurve& curve) const;
};

/// Flow with the default margin a/8.
FlowSpec make_flow(const StripDomain& domain, std::vector<double> direction, std::vector<double> times);

/// C^2 cutoff in y: 1 for |y| <= a/2, 0 for |y| >= a - margin, quintic smoothstep between.
/// Because it is identically 1 around the curve, the flow field is constant
/// along its own trajectories there, so DX[X] vanishes on the curve and the
/// second variation reduces to the critical-pair form.
double cutoff_profile(double y, double half_height, double margin);

/// psi' at the nodes, periodic 4-point central stencil.
std::vector<double> slopes(const GraphCurve& curve);

/// Signed graph curvature psi''/(1+psi'^2)^{3/2}. A concave-down bump is
/// negative. The divergence of the upward unit normal is the negative of this.
std::vector<double> curvature(const GraphCurve& curve);

/// Arc length over one period: trapezoid rule on sqrt(1+psi'^2).
double curve_length(const GraphCurve& curve);

/// Chord lengths of the segments [x_i, x_{i+1}] (wrapping at the last node).
std::vector<double> chord_lengths(const GraphCurve& curve);

/// Moves the curve to heights psi_i + t*direction_i.
GraphCurve flow_curve(const GraphCurve& curve, const FlowSpec& flow, double t, const StripDomain& domain);

/// Normal component X.nu of the vertical field direction*e_y on the curve.
std::vector<double> normal_component(const GraphCurve& curve, std::span<const double> direction);

}  // namespace msstab
