#include "msstab/variation_validator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "msstab/error.hpp"

namespace msstab {

namespace {

// Index of the sample at time t, matched to a relative tolerance.
std::optional<std::size_t> find_time(std::span<const double> times, double t) {
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (std::abs(times[k] - t) <= 1e-12 * std::max(1.0, std::abs(t))) return k;
    }
    return std::nullopt;
}

}  // namespace

CriticalityReport criticality_residuals(const StripDomain& domain, const GraphCurve& curve, const SlitField& state) {
    require(state.curve().size() == curve.size(), ErrorCode::InvalidArgument, "state lives on a different curve");
    (void)domain;
    CriticalityReport report;
    const auto grad_plus = state.tangential_gradient(Side::plus);
    const auto grad_minus = state.tangential_gradient(Side::minus);
    const auto k = curvature(curve);
    const auto jumps = state.jumps();
    report.transmission.resize(curve.size());
    report.min_jump = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const double mean_curvature = -k[i];  // div nu, nu pointing into the upper component
        const double f = grad_minus[i] * grad_minus[i] - grad_plus[i] * grad_plus[i] + mean_curvature;
        report.transmission[i] = f;
        report.transmission_sup = std::max(report.transmission_sup, std::abs(f));
        if (std::abs(jumps[i]) < report.min_jump) {
            report.min_jump = std::abs(jumps[i]);
            report.min_jump_x = curve.x(i);
        }
    }
    return report;
}

CriticalityReport criticality_residuals(const SegmentConfig& segment) {
    segment.validate();
    CriticalityReport report;
    report.transmission.assign(2, 0.0);
    report.orthogonality_defect = 0.0;
    report.min_jump = std::numeric_limits<double>::infinity();
    return report;
}

std::vector<double> energy_along_flow(const StripDomain& domain, const GraphCurve& curve, const FlowSpec& flow,
                                      const Grid& grid, const SolverOptions& options, std::size_t jobs) {
    domain.validate();
    flow.validate(domain, curve);
    std::vector<double> samples(flow.times.size(), 0.0);
    std::vector<std::exception_ptr> errors(flow.times.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < flow.times.size(); k = next++) {
            try {
                const GraphCurve moved = flow_curve(curve, flow, flow.times[k], domain);
                const auto [state, stats] = solve_state(domain, moved, grid, options);
                samples[k] = dirichlet_energy(state) + curve_length(moved);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    const std::size_t threads = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(1, flow.times.size()));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return samples;
}

FdEstimate fd_derivatives(std::span<const double> times, std::span<const double> samples) {
    require(times.size() == samples.size(), ErrorCode::InsufficientSamples, "one sample per time is required");
    require(times.size() >= 5, ErrorCode::InsufficientSamples, "need at least 5 symmetric samples");
    std::vector<double> positive;
    for (double t : times) {
        if (t > 0.0) positive.push_back(t);
    }
    std::sort(positive.begin(), positive.end());
    require(positive.size() >= 2, ErrorCode::InsufficientSamples, "need two positive step sizes");
    const double h = positive.front();
    const double big = positive.back();
    const auto i0 = find_time(times, 0.0);
    const auto ip = find_time(times, h), im = find_time(times, -h);
    const auto jp = find_time(times, big), jm = find_time(times, -big);
    require(i0 && ip && im && jp && jm, ErrorCode::InsufficientSamples, "samples must be symmetric about t = 0");

    const double g0 = samples[*i0];
    const double d1_h = (samples[*ip] - samples[*im]) / (2.0 * h);
    const double d1_big = (samples[*jp] - samples[*jm]) / (2.0 * big);
    const double d2_h = (samples[*ip] - 2.0 * g0 + samples[*im]) / (h * h);
    const double d2_big = (samples[*jp] - 2.0 * g0 + samples[*jm]) / (big * big);
    const double q2 = (big / h) * (big / h);

    FdEstimate out;
    out.first_small_step = d1_h;
    out.second_small_step = d2_h;
    out.first = (q2 * d1_h - d1_big) / (q2 - 1.0);
    out.second = (q2 * d2_h - d2_big) / (q2 - 1.0);
    out.first_error = std::abs(d1_h - d1_big);
    out.second_error = std::abs(d2_h - d2_big);
    return out;
}

ValidationReport validate_second_variation(const StripDomain& domain, const GraphCurve& curve,
                                           const SlitField& state, std::span<const double> direction,
                                           const Grid& grid, const SolverOptions& solver,
                                           const ValidationOptions& options) {
    require(options.small_step > 0.0 && options.large_step > options.small_step, ErrorCode::InvalidArgument,
            "validation needs steps 0 < small < large");
    ValidationReport report;
    report.criticality = criticality_residuals(domain, curve, state);
    report.critical = report.criticality.critical(options.transmission_tol);

    const double h = options.small_step, big = options.large_step;
    report.times = {-big, -h, 0.0, h, big};
    const FlowSpec flow = make_flow(domain, {direction.begin(), direction.end()}, report.times);
    report.samples = energy_along_flow(domain, curve, flow, grid, solver, options.jobs);
    report.base_energy = report.samples[2];
    report.fd = fd_derivatives(report.times, report.samples);

    const auto phi = normal_component(curve, direction);
    // Translations are in the kernel of (.,.)~ on the flat curve; the operator
    // route then works on the mean-zero complement, which T never leaves.
    TildeGram gram = assemble_tilde_gram(curve, Restriction::none);
    if (!gram.positive_definite()) gram = assemble_tilde_gram(curve, Restriction::mean_zero);
    const TOperator op(domain, curve, state, grid, std::move(gram), solver);
    report.assembled = second_variation_value(op, phi);

    const double d2f = report.assembled.value();
    report.mismatch = std::abs(report.fd.second - d2f) / std::max(1.0, std::abs(d2f));
    report.first_variation_ok = std::abs(report.fd.first) <= options.first_variation_tol * report.base_energy;
    report.second_variation_ok = report.mismatch <= options.second_variation_tol;
    return report;
}

}  // namespace msstab
