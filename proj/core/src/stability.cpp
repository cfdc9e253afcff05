#include "msstab/stability.hpp"

#include "msstab/analytic_oracle.hpp"
#include "msstab/error.hpp"

namespace msstab {

StabilityReport analyze_strip(const StripDomain& domain, const GraphCurve& curve, const AnalysisOptions& options) {
    domain.validate();
    StabilityReport report;
    report.grid = options.grid;
    report.curve_nodes = curve.size();
    report.restriction = options.restriction;
    report.band = options.band;

    auto [state, state_stats] = solve_state(domain, curve, options.grid, options.solver);
    report.state_stats = state_stats;
    report.criticality = criticality_residuals(domain, curve, state);

    TOperator op(domain, curve, std::move(state), options.grid, assemble_tilde_gram(curve, options.restriction),
                 options.solver);
    const EigenResult top = lambda1(op, options.eigen);
    report.lambda1 = top.value;
    report.lambda1_iterations = top.iterations;
    report.lambda1_last_change = top.last_change;
    if (options.compute_mu) report.mu = mu(op, options.eigen);
    report.operator_stats = op.stats();
    report.verdict = classify_lambda1(report.lambda1, options.band);
    return report;
}

StabilityReport analyze_segment(const SegmentConfig& segment, std::size_t nodes, const AnalysisOptions& options) {
    segment.validate();
    StabilityReport report;
    report.grid = options.grid;
    report.curve_nodes = nodes;
    report.restriction = options.restriction;
    report.band = options.band;
    report.criticality = criticality_residuals(segment);

    // u is constant on each side, so grad_G u = 0, v_phi = 0 and T = 0.
    const TOperator op = TOperator::zero(assemble_tilde_gram(segment, nodes, options.restriction));
    report.lambda1 = lambda1(op, options.eigen).value;
    if (options.compute_mu) report.mu = mu(op, options.eigen);
    report.coercivity = segment_min_eig(segment.length, segment.h1, segment.h2, nodes);
    report.verdict = classify_coercivity(*report.coercivity);
    return report;
}

}  // namespace msstab
