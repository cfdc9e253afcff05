#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "msstab/elliptic.hpp"
#include "msstab/geometry.hpp"
#include "msstab/second_variation.hpp"

namespace msstab {

/// Residuals of the critical-pair conditions on the curve.
struct CriticalityReport {
    /// f = |grad_G u^-|^2 - |grad_G u^+|^2 + H at the nodes, H = div of the upward normal.
    std::vector<double> transmission;
    double transmission_sup = 0.0;
    double min_jump = 0.0;  // min |u^+ - u^-| over the nodes of [0, b)
    double min_jump_x = 0.0;
    /// Angle between the curve and the outer boundary minus pi/2 (segment mode only).
    std::optional<double> orthogonality_defect;

    [[nodiscard]] bool critical(double transmission_tol) const noexcept {
        return transmission_sup <= transmission_tol;
    }
    [[nodiscard]] bool jump_nonvanishing(double floor) const noexcept { return min_jump >= floor; }
};

CriticalityReport criticality_residuals(const StripDomain& domain, const GraphCurve& curve, const SlitField& state);

/// The straight segment meets the boundary orthogonally and carries constant
/// traces, so every residual is zero by construction.
CriticalityReport criticality_residuals(const SegmentConfig& segment);

/// g(t_j) = Dirichlet energy of the re-solved state + length of the flowed curve.
/// Samples are independent and may be computed on up to `jobs` threads; the
/// result does not depend on the schedule.
std::vector<double> energy_along_flow(const StripDomain& domain, const GraphCurve& curve, const FlowSpec& flow,
                                      const Grid& grid, const SolverOptions& options = {}, std::size_t jobs = 1);

struct FdEstimate {
    double first = 0.0;
    double second = 0.0;
    double first_error = 0.0;   // |D_h - D_H|
    double second_error = 0.0;
    double first_small_step = 0.0;
    double second_small_step = 0.0;
};

/// Central differences at the two step sizes h < H found in `times`
/// (which must hold 0, +-h, +-H), Richardson-extrapolated for the O(h^2) term.
FdEstimate fd_derivatives(std::span<const double> times, std::span<const double> samples);

struct ValidationOptions {
    double small_step = 5e-3;
    double large_step = 1e-2;
    double first_variation_tol = 1e-4;   // |g'(0)| <= tol * g(0)
    double second_variation_tol = 0.05;  // relative to max(1, |d2F|)
    double transmission_tol = 1e-6;      // below this the pair is treated as critical
    std::size_t jobs = 1;
};

struct ValidationReport {
    std::vector<double> times;
    std::vector<double> samples;
    FdEstimate fd;
    double base_energy = 0.0;
    SecondVariationValue assembled;
    double mismatch = 0.0;  // |g''(0) - d2F| / max(1, |d2F|)
    bool critical = false;
    bool first_variation_ok = false;
    bool second_variation_ok = false;
    CriticalityReport criticality;

    /// Both derivative checks pass at a critical pair; non-critical pairs never pass
    /// and the report is informational.
    [[nodiscard]] bool passed() const noexcept { return critical && first_variation_ok && second_variation_ok; }
};

/// Compares finite differences of t -> F(G_{t psi}, u_{t psi}) at t = 0 with the
/// assembled second variation in the normal direction X.nu. Uses only the
/// geometry, elliptic and second-variation modules.
ValidationReport validate_second_variation(const StripDomain& domain, const GraphCurve& curve,
                                           const SlitField& state, std::span<const double> direction,
                                           const Grid& grid, const SolverOptions& solver = {},
                                           const ValidationOptions& options = {});

}  // namespace msstab
