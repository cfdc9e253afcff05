#pragma once

#include <cstddef>
#include <optional>

#include "msstab/elliptic.hpp"
#include "msstab/geometry.hpp"
#include "msstab/second_variation.hpp"
#include "msstab/variation_validator.hpp"

namespace msstab {

struct AnalysisOptions {
    Grid grid;
    SolverOptions solver;
    EigenOptions eigen;
    Restriction restriction = Restriction::mean_zero;
    bool compute_mu = false;
    double band = 0.02;
};

/// Outcome of one stability analysis. For the strip the verdict follows
/// lambda1 against 1 (mu > 1 is the equivalent dual statement); for the
/// segment T vanishes and the verdict follows the sign of the coercivity
/// eigenvalue of (.,.)~ relative to the H^1 norm.
struct StabilityReport {
    double lambda1 = 0.0;
    std::size_t lambda1_iterations = 0;
    double lambda1_last_change = 0.0;
    std::optional<MuResult> mu;
    std::optional<double> coercivity;
    Verdict verdict = Verdict::marginal;
    double band = 0.02;
    CriticalityReport criticality;
    Grid grid;
    std::size_t curve_nodes = 0;
    Restriction restriction = Restriction::mean_zero;
    SolveStats state_stats;
    SolveStats operator_stats;
};

StabilityReport analyze_strip(const StripDomain& domain, const GraphCurve& curve, const AnalysisOptions& options);

StabilityReport analyze_segment(const SegmentConfig& segment, std::size_t nodes, const AnalysisOptions& options);

}  // namespace msstab
