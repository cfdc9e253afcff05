#include "msstab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "msstab/error.hpp"

namespace msstab {

namespace {

std::size_t wrap(std::ptrdiff_t i, std::size_t n) {
    const auto m = static_cast<std::ptrdiff_t>(n);
    return static_cast<std::size_t>(((i % m) + m) % m);
}

std::vector<double> second_derivatives(const GraphCurve& curve) {
    const auto psi = curve.heights();
    const std::size_t n = psi.size();
    const double h = curve.spacing();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::ptrdiff_t>(i);
        out[i] = (-psi[wrap(k + 2, n)] + 16.0 * psi[wrap(k + 1, n)] - 30.0 * psi[i] +
                  16.0 * psi[wrap(k - 1, n)] - psi[wrap(k - 2, n)]) /
                 (12.0 * h * h);
    }
    return out;
}

}  // namespace

double BoundaryTrace::periodic_part(double x, double period) const {
    double value = offset;
    for (const auto& term : terms) {
        const double arg = 2.0 * std::numbers::pi * term.wavenumber * x / period;
        value += term.cos_coeff * std::cos(arg) + term.sin_coeff * std::sin(arg);
    }
    return value;
}

void StripDomain::validate() const {
    require(std::isfinite(half_height) && half_height > 0.0, ErrorCode::InvalidArgument,
            "strip half_height must be positive");
    require(std::isfinite(period) && period > 0.0, ErrorCode::InvalidArgument, "strip period must be positive");
    for (const auto* trace : {&top, &bottom}) {
        require(std::isfinite(trace->slope) && std::isfinite(trace->offset), ErrorCode::InvalidArgument,
                "Dirichlet data must be finite");
        for (const auto& term : trace->terms) {
            require(term.wavenumber >= 1, ErrorCode::InvalidArgument, "Fourier wavenumber must be >= 1");
        }
    }
}

void SegmentConfig::validate() const {
    require(std::isfinite(length) && length > 0.0, ErrorCode::InvalidArgument, "segment length must be positive");
    require(std::isfinite(h1) && std::isfinite(h2), ErrorCode::InvalidArgument,
            "endpoint curvatures must be finite");
}

GraphCurve::GraphCurve(double period, std::vector<double> heights, std::optional<std::size_t> endpoint)
    : period_(period), heights_(std::move(heights)), endpoint_(endpoint) {
    require(std::isfinite(period_) && period_ > 0.0, ErrorCode::InvalidArgument, "curve period must be positive");
    require(heights_.size() >= min_nodes, ErrorCode::InvalidArgument,
            "curve needs at least " + std::to_string(min_nodes) + " nodes");
    require(std::all_of(heights_.begin(), heights_.end(), [](double v) { return std::isfinite(v); }),
            ErrorCode::InvalidArgument, "curve heights must be finite");
    require(!endpoint_ || *endpoint_ < heights_.size(), ErrorCode::InvalidArgument, "endpoint node out of range");
}

GraphCurve GraphCurve::flat(double period, std::size_t nodes, double height) {
    return GraphCurve(period, std::vector<double>(nodes, height));
}

GraphCurve GraphCurve::sample(double period, std::size_t nodes, const std::function<double(double)>& profile) {
    std::vector<double> heights(nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
        heights[i] = profile(static_cast<double>(i) * period / static_cast<double>(nodes));
    }
    return GraphCurve(period, std::move(heights));
}

double GraphCurve::max_abs_height() const noexcept {
    double m = 0.0;
    for (double v : heights_) m = std::max(m, std::abs(v));
    return m;
}

GraphCurve GraphCurve::with_endpoint(std::size_t node) const { return GraphCurve(period_, heights_, node); }

void GraphCurve::require_inside(double limit) const {
    if (max_abs_height() >= limit) {
        fail(ErrorCode::CurveEscapesStrip,
             "max|psi| = " + std::to_string(max_abs_height()) + " reaches the limit " + std::to_string(limit));
    }
}

void FlowSpec::validate(const StripDomain& domain, const GraphCurve& curve) const {
    require(direction.size() == curve.size(), ErrorCode::InvalidArgument,
            "flow direction must have one sample per curve node");
    require(cutoff_margin > 0.0 && cutoff_margin < domain.half_height / 2.0, ErrorCode::InvalidArgument,
            "cutoff margin must lie in (0, a/2)");
    double dmax = 0.0;
    for (double v : direction) dmax = std::max(dmax, std::abs(v));
    for (double t : times) {
        if (std::abs(t) * dmax >= domain.half_height - cutoff_margin) {
            fail(ErrorCode::CurveEscapesStrip, "flow time " + std::to_string(t) + " leaves the cutoff region");
        }
    }
}

FlowSpec make_flow(const StripDomain& domain, std::vector<double> direction, std::vector<double> times) {
    return FlowSpec{std::move(direction), domain.half_height / 8.0, std::move(times)};
}

double cutoff_profile(double y, double half_height, double margin) {
    const double inner = half_height / 2.0;
    const double outer = half_height - margin;
    const double r = std::abs(y);
    if (r <= inner) return 1.0;
    if (r >= outer) return 0.0;
    const double s = (r - inner) / (outer - inner);
    return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

std::vector<double> slopes(const GraphCurve& curve) {
    const auto psi = curve.heights();
    const std::size_t n = psi.size();
    const double h = curve.spacing();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::ptrdiff_t>(i);
        out[i] = (-psi[wrap(k + 2, n)] + 8.0 * psi[wrap(k + 1, n)] - 8.0 * psi[wrap(k - 1, n)] +
                  psi[wrap(k - 2, n)]) /
                 (12.0 * h);
    }
    return out;
}

std::vector<double> curvature(const GraphCurve& curve) {
    const auto d1 = slopes(curve);
    auto d2 = second_derivatives(curve);
    for (std::size_t i = 0; i < d2.size(); ++i) {
        d2[i] /= std::pow(1.0 + d1[i] * d1[i], 1.5);
    }
    return d2;
}

double curve_length(const GraphCurve& curve) {
    // trapezoid on a periodic integrand: equal weights
    double sum = 0.0;
    for (double d : slopes(curve)) sum += std::sqrt(1.0 + d * d);
    return sum * curve.spacing();
}

std::vector<double> chord_lengths(const GraphCurve& curve) {
    const auto psi = curve.heights();
    const std::size_t n = psi.size();
    const double h = curve.spacing();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = std::hypot(h, psi[(i + 1) % n] - psi[i]);
    }
    return out;
}

GraphCurve flow_curve(const GraphCurve& curve, const FlowSpec& flow, double t, const StripDomain& domain) {
    require(flow.direction.size() == curve.size(), ErrorCode::InvalidArgument,
            "flow direction must have one sample per curve node");
    std::vector<double> heights(curve.heights().begin(), curve.heights().end());
    for (std::size_t i = 0; i < heights.size(); ++i) heights[i] += t * flow.direction[i];
    GraphCurve out(curve.period(), std::move(heights), curve.endpoint());
    out.require_inside(domain.half_height - flow.cutoff_margin);
    return out;
}

std::vector<double> normal_component(const GraphCurve& curve, std::span<const double> direction) {
    require(direction.size() == curve.size(), ErrorCode::InvalidArgument,
            "direction must have one sample per curve node");
    const auto d1 = slopes(curve);
    std::vector<double> out(direction.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = direction[i] / std::sqrt(1.0 + d1[i] * d1[i]);
    return out;
}

}  // namespace msstab
