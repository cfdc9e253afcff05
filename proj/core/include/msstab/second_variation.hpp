#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "msstab/elliptic.hpp"
#include "msstab/geometry.hpp"

namespace msstab {

/// Subspace of trace functions on which the quadratic forms are studied.
enum class Restriction {
    none,
    mean_zero,      // arclength-weighted mean vanishes (removes translations)
    endpoint_zero,  // value at the marked endpoint (or both segment ends) vanishes
};

std::string_view to_string(Restriction r) noexcept;
Restriction parse_restriction(std::string_view text);

/// Discrete matrix of the curve scalar product
///   (phi, chi)~ = int_G grad_G phi . grad_G chi + int_G H^2 phi chi - sum_endpoints H_bd phi chi
/// on P1 nodal values, together with a basis Q of the restriction subspace.
class TildeGram {
public:
    TildeGram(Eigen::MatrixXd matrix, Eigen::VectorXd weights, Restriction restriction, Eigen::MatrixXd basis);

    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }
    [[nodiscard]] const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
    /// Quadrature weights of the nodes (trapezoid, arclength).
    [[nodiscard]] const Eigen::VectorXd& weights() const noexcept { return weights_; }
    [[nodiscard]] Restriction restriction() const noexcept { return restriction_; }
    [[nodiscard]] const Eigen::MatrixXd& basis() const noexcept { return basis_; }
    [[nodiscard]] Eigen::MatrixXd reduced() const { return basis_.transpose() * matrix_ * basis_; }
    /// Extreme eigenvalues of the reduced matrix.
    [[nodiscard]] double min_eigenvalue() const noexcept;
    [[nodiscard]] double max_eigenvalue() const noexcept;

    [[nodiscard]] double inner(std::span<const double> phi, std::span<const double> chi) const;
    [[nodiscard]] double norm_squared(std::span<const double> phi) const { return inner(phi, phi); }

    /// True when the reduced matrix is positive definite (the scalar-product hypothesis).
    [[nodiscard]] bool positive_definite() const;

    /// Solves (x, psi)~ = rhs . psi for all psi in the subspace, x in the subspace.
    /// Throws GramSingular if the reduced matrix is not positive definite.
    [[nodiscard]] Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

private:
    struct Factor;

    Eigen::MatrixXd matrix_;
    Eigen::VectorXd weights_;
    Restriction restriction_;
    Eigen::MatrixXd basis_;
    std::shared_ptr<const Factor> factor_;
};

/// Periodic graph curve: P1 stiffness on chords plus lumped H^2 mass, no boundary term.
TildeGram assemble_tilde_gram(const GraphCurve& curve, Restriction restriction);

/// Straight segment of the given length with m uniform nodes: H = 0 on the
/// segment, endpoint terms -h1 phi(0)^2 - h2 phi(L)^2.
TildeGram assemble_tilde_gram(const SegmentConfig& segment, std::size_t nodes, Restriction restriction);

/// Nonlocal operator T on trace functions, defined through
///   (T phi, psi)~ = -2 int_G [v_phi^+ div_G(psi grad_G u^+) - v_phi^- div_G(psi grad_G u^-)]
///                = 2 int grad v_phi . grad v_psi.
/// Each application costs one jump-source solve and one small dense Gram solve.
/// A configuration without tangential gradient of u (the segment) gives T = 0.
class TOperator {
public:
    TOperator(const StripDomain& domain, const GraphCurve& curve, SlitField state, const Grid& grid, TildeGram gram,
              SolverOptions options = {});

    /// Zero operator on the given Gram space.
    static TOperator zero(TildeGram gram);

    [[nodiscard]] const TildeGram& gram() const noexcept { return gram_; }
    [[nodiscard]] bool is_zero() const noexcept { return solver_ == nullptr; }
    [[nodiscard]] std::size_t size() const noexcept { return gram_.size(); }
    [[nodiscard]] const SlitField* state() const noexcept { return state_ ? &*state_ : nullptr; }

    /// r with r . psi = (T phi, psi)~ for every psi.
    [[nodiscard]] Eigen::VectorXd response(std::span<const double> phi) const;

    /// Riesz representative of a response in the restricted subspace.
    [[nodiscard]] Eigen::VectorXd riesz(const Eigen::VectorXd& response) const { return gram_.solve(response); }

    /// T phi = G^{-1} r on the restriction subspace.
    [[nodiscard]] std::vector<double> apply(std::span<const double> phi) const;

    /// (T phi, chi)~.
    [[nodiscard]] double form(std::span<const double> phi, std::span<const double> chi) const;

    /// v_phi, or nullopt for the zero operator.
    [[nodiscard]] std::optional<SlitField> jump_source(std::span<const double> phi) const;
    /// Accumulated work of every jump-source solve made through this operator.
    [[nodiscard]] SolveStats stats() const;

    /// r_v with r_v . psi = -2 int_G [v^+ div_G(psi grad_G u^+) - v^- div_G(psi grad_G u^-)],
    /// so that Phi_v = riesz(dual_response(v)).
    [[nodiscard]] Eigen::VectorXd dual_response(const SlitField& v) const;

private:
    TOperator(TildeGram gram) : gram_(std::move(gram)) {}

    struct Counters;

    TildeGram gram_;
    std::optional<SlitField> state_;
    std::shared_ptr<const SlitSolver> solver_;
    std::shared_ptr<Counters> counters_;
};

/// Second variation evaluated two ways:
///   direct   = -2 int |grad v_phi|^2 + ||phi||~^2
///   operator = ||phi||~^2 - (T phi, phi)~
struct SecondVariationValue {
    double direct = 0.0;
    double via_operator = 0.0;

    [[nodiscard]] double value() const noexcept { return direct; }
    [[nodiscard]] double mismatch() const noexcept;
};

SecondVariationValue second_variation_value(const TOperator& op, std::span<const double> phi);

struct EigenOptions {
    double rel_tol = 1e-8;
    std::size_t max_iterations = 500;
    std::uint64_t seed = 0x5eed5eedULL;
};

struct EigenResult {
    double value = 0.0;
    std::size_t iterations = 0;
    double last_change = 0.0;
    std::vector<double> vector;  // G-normalized eigenfunction (nodal values)
};

/// Largest eigenvalues of T in the (.,.)~ geometry by power iteration with
/// G-orthogonal deflation; lambda1 is the first. Throws NoConvergence.
std::vector<EigenResult> leading_eigenpairs(const TOperator& op, std::size_t count, const EigenOptions& options = {});
EigenResult lambda1(const TOperator& op, const EigenOptions& options = {});

/// (T phi, phi)~ / (phi, phi)~.
double rayleigh_quotient(const TOperator& op, std::span<const double> phi);

struct MuResult {
    double value = 0.0;  // +inf when no field has a nonzero Phi_v
    bool infinite = false;
    std::size_t iterations = 0;
    double last_change = 0.0;
};

/// mu = min { 2 int |grad v|^2 : ||Phi_v||~ = 1 } by inverse power iteration on
/// the pencil (2K, Phi^T G Phi), iterating in the range of the jump-source map
/// so that fields with Phi_v = 0 never enter.
MuResult mu(const TOperator& op, const EigenOptions& options = {});

enum class Verdict { strictly_stable, unstable, marginal };

std::string_view to_string(Verdict v) noexcept;

/// strictly_stable iff lambda1 < 1 - band, unstable iff lambda1 > 1 + band.
Verdict classify_lambda1(double lambda1, double band = 0.02);

/// Verdict from a coercivity eigenvalue (positive = stable) with the same band.
Verdict classify_coercivity(double min_eigenvalue, double band = 1e-9);

}  // namespace msstab
