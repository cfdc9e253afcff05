#include "msstab/second_variation.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <mutex>
#include <random>
#include <string>

#include "msstab/error.hpp"

namespace msstab {

namespace {

Eigen::Map<const Eigen::VectorXd> as_vector(std::span<const double> v) {
    return {v.data(), static_cast<Eigen::Index>(v.size())};
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::MatrixXd restriction_basis(const Eigen::VectorXd& weights, Restriction restriction,
                                  const std::vector<std::size_t>& endpoints) {
    const Eigen::Index m = weights.size();
    switch (restriction) {
        case Restriction::none:
            return Eigen::MatrixXd::Identity(m, m);
        case Restriction::mean_zero: {
            // columns e_k - (w_k / w_last) e_last span {phi : sum w_i phi_i = 0}
            Eigen::MatrixXd q = Eigen::MatrixXd::Zero(m, m - 1);
            for (Eigen::Index k = 0; k < m - 1; ++k) {
                q(k, k) = 1.0;
                q(m - 1, k) = -weights[k] / weights[m - 1];
            }
            return q;
        }
        case Restriction::endpoint_zero: {
            const auto dropped = static_cast<Eigen::Index>(endpoints.size());
            Eigen::MatrixXd q = Eigen::MatrixXd::Zero(m, m - dropped);
            Eigen::Index col = 0;
            for (Eigen::Index k = 0; k < m; ++k) {
                bool skip = false;
                for (auto e : endpoints) skip = skip || static_cast<Eigen::Index>(e) == k;
                if (!skip) q(k, col++) = 1.0;
            }
            return q;
        }
    }
    return Eigen::MatrixXd::Identity(m, m);
}

std::vector<double> random_start(const TildeGram& gram, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::VectorXd coeffs(gram.basis().cols());
    for (Eigen::Index k = 0; k < coeffs.size(); ++k) coeffs[k] = dist(rng);
    return to_std(gram.basis() * coeffs);
}

void g_orthogonalize(const TildeGram& gram, std::vector<double>& v, const std::vector<EigenResult>& against) {
    for (const auto& e : against) {
        const double c = gram.inner(v, e.vector);
        for (std::size_t k = 0; k < v.size(); ++k) v[k] -= c * e.vector[k];
    }
}

bool g_normalize(const TildeGram& gram, std::vector<double>& v) {
    const double n2 = gram.norm_squared(v);
    if (!(n2 > 0.0) || !std::isfinite(n2)) return false;
    const double inv = 1.0 / std::sqrt(n2);
    for (double& x : v) x *= inv;
    return true;
}

}  // namespace

std::string_view to_string(Restriction r) noexcept {
    switch (r) {
        case Restriction::none: return "none";
        case Restriction::mean_zero: return "mean_zero";
        case Restriction::endpoint_zero: return "endpoint_zero";
    }
    return "none";
}

Restriction parse_restriction(std::string_view text) {
    if (text == "none") return Restriction::none;
    if (text == "mean_zero") return Restriction::mean_zero;
    if (text == "endpoint_zero") return Restriction::endpoint_zero;
    fail(ErrorCode::InvalidRestriction, "unknown restriction '" + std::string(text) + "'");
}

struct TildeGram::Factor {
    Eigen::LLT<Eigen::MatrixXd> llt;
    double min_eig = 0.0;
    double max_eig = 0.0;
    bool positive = false;
};

TildeGram::TildeGram(Eigen::MatrixXd matrix, Eigen::VectorXd weights, Restriction restriction, Eigen::MatrixXd basis)
    : matrix_(std::move(matrix)), weights_(std::move(weights)), restriction_(restriction), basis_(std::move(basis)) {
    require(matrix_.rows() == matrix_.cols() && matrix_.rows() == basis_.rows() && weights_.size() == matrix_.rows(),
            ErrorCode::InvalidArgument, "inconsistent Gram dimensions");
    auto f = std::make_shared<Factor>();
    const Eigen::MatrixXd r = reduced();
    if (r.size() > 0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(r, Eigen::EigenvaluesOnly);
        f->min_eig = eig.eigenvalues().minCoeff();
        f->max_eig = eig.eigenvalues().maxCoeff();
        const double scale = std::max(std::abs(f->max_eig), std::abs(f->min_eig));
        f->positive = f->min_eig > 1e-12 * scale;
        if (f->positive) f->llt.compute(r);
    }
    factor_ = std::move(f);
}

double TildeGram::min_eigenvalue() const noexcept { return factor_->min_eig; }
double TildeGram::max_eigenvalue() const noexcept { return factor_->max_eig; }
bool TildeGram::positive_definite() const { return factor_->positive; }

double TildeGram::inner(std::span<const double> phi, std::span<const double> chi) const {
    require(phi.size() == size() && chi.size() == size(), ErrorCode::InvalidArgument,
            "trace vectors must have one sample per node");
    return as_vector(phi).dot(matrix_ * as_vector(chi));
}

Eigen::VectorXd TildeGram::solve(const Eigen::VectorXd& rhs) const {
    if (!factor_->positive) {
        fail(ErrorCode::GramSingular, "(.,.)~ is not positive definite on the " + std::string(to_string(restriction_)) +
                                          " subspace (min eigenvalue " + std::to_string(factor_->min_eig) + ")");
    }
    const Eigen::VectorXd coeffs = factor_->llt.solve(basis_.transpose() * rhs);
    return basis_ * coeffs;
}

TildeGram assemble_tilde_gram(const GraphCurve& curve, Restriction restriction) {
    const std::size_t m = curve.size();
    const auto len = chord_lengths(curve);
    const auto h = curvature(curve);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
        const auto a = static_cast<Eigen::Index>(i);
        const auto b = static_cast<Eigen::Index>((i + 1) % m);
        const double k = 1.0 / len[i];
        g(a, a) += k;
        g(b, b) += k;
        g(a, b) -= k;
        g(b, a) -= k;
        w[a] += 0.5 * len[i];
        w[b] += 0.5 * len[i];
    }
    for (std::size_t i = 0; i < m; ++i) {
        const auto a = static_cast<Eigen::Index>(i);
        g(a, a) += w[a] * h[i] * h[i];
    }
    std::vector<std::size_t> endpoints;
    if (restriction == Restriction::endpoint_zero) {
        if (!curve.endpoint()) {
            fail(ErrorCode::InvalidRestriction, "endpoint_zero needs a periodic curve with a marked endpoint");
        }
        endpoints.push_back(*curve.endpoint());
    }
    Eigen::MatrixXd q = restriction_basis(w, restriction, endpoints);
    return TildeGram(std::move(g), std::move(w), restriction, std::move(q));
}

TildeGram assemble_tilde_gram(const SegmentConfig& segment, std::size_t nodes, Restriction restriction) {
    segment.validate();
    require(nodes >= 2, ErrorCode::InvalidArgument, "segment needs at least two nodes");
    const auto m = static_cast<Eigen::Index>(nodes);
    const double h = segment.length / static_cast<double>(nodes - 1);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(m);
    for (Eigen::Index i = 0; i + 1 < m; ++i) {
        const double k = 1.0 / h;
        g(i, i) += k;
        g(i + 1, i + 1) += k;
        g(i, i + 1) -= k;
        g(i + 1, i) -= k;
        w[i] += 0.5 * h;
        w[i + 1] += 0.5 * h;
    }
    g(0, 0) -= segment.h1;
    g(m - 1, m - 1) -= segment.h2;
    std::vector<std::size_t> endpoints;
    if (restriction == Restriction::endpoint_zero) endpoints = {0, nodes - 1};
    Eigen::MatrixXd q = restriction_basis(w, restriction, endpoints);
    return TildeGram(std::move(g), std::move(w), restriction, std::move(q));
}

struct TOperator::Counters {
    std::mutex mutex;
    SolveStats stats;
};

TOperator::TOperator(const StripDomain& domain, const GraphCurve& curve, SlitField state, const Grid& grid,
                     TildeGram gram, SolverOptions options)
    : gram_(std::move(gram)),
      state_(std::move(state)),
      solver_(std::make_shared<SlitSolver>(domain.half_height, curve, grid, options)),
      counters_(std::make_shared<Counters>()) {
    require(gram_.size() == curve.size(), ErrorCode::InvalidArgument, "Gram size differs from the curve node count");
    require(state_->grid().nx == grid.nx && state_->grid().ny == grid.ny, ErrorCode::InvalidArgument,
            "state was solved on a different grid");
}

TOperator TOperator::zero(TildeGram gram) {
    TOperator op(std::move(gram));
    op.counters_ = std::make_shared<Counters>();
    return op;
}

std::optional<SlitField> TOperator::jump_source(std::span<const double> phi) const {
    require(phi.size() == size(), ErrorCode::InvalidArgument, "phi must have one sample per node");
    if (is_zero()) return std::nullopt;
    auto [field, stats] = solver_->solve_jump_source(*state_, phi);
    {
        std::lock_guard lock(counters_->mutex);
        counters_->stats.merge(stats);
    }
    return std::move(field);
}

SolveStats TOperator::stats() const {
    std::lock_guard lock(counters_->mutex);
    return counters_->stats;
}

Eigen::VectorXd TOperator::dual_response(const SlitField& v) const {
    if (is_zero()) return Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size()));
    const auto adj = jump_source_adjoint(*state_, v);
    return 2.0 * as_vector(adj);
}

Eigen::VectorXd TOperator::response(std::span<const double> phi) const {
    const auto v = jump_source(phi);
    if (!v) return Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size()));
    return dual_response(*v);
}

std::vector<double> TOperator::apply(std::span<const double> phi) const {
    if (is_zero()) return std::vector<double>(size(), 0.0);
    return to_std(riesz(response(phi)));
}

double TOperator::form(std::span<const double> phi, std::span<const double> chi) const {
    require(chi.size() == size(), ErrorCode::InvalidArgument, "chi must have one sample per node");
    return response(phi).dot(as_vector(chi));
}

double SecondVariationValue::mismatch() const noexcept { return std::abs(direct - via_operator); }

SecondVariationValue second_variation_value(const TOperator& op, std::span<const double> phi) {
    const TildeGram& gram = op.gram();
    const double norm2 = gram.norm_squared(phi);
    SecondVariationValue out;
    const auto v = op.jump_source(phi);
    const double energy = v ? dirichlet_energy(*v) : 0.0;
    out.direct = -2.0 * energy + norm2;
    if (op.is_zero()) {
        out.via_operator = norm2;
        return out;
    }
    // (T phi, phi)~ through the Riesz representative, i.e. through G^{-1}
    const Eigen::VectorXd t_phi = op.riesz(op.dual_response(*v));
    out.via_operator = norm2 - as_vector(phi).dot(gram.matrix() * t_phi);
    return out;
}

std::vector<EigenResult> leading_eigenpairs(const TOperator& op, std::size_t count, const EigenOptions& options) {
    const TildeGram& gram = op.gram();
    std::vector<EigenResult> found;
    std::mt19937_64 rng(options.seed);
    for (std::size_t n = 0; n < count; ++n) {
        EigenResult result;
        if (op.is_zero()) {
            result.vector = random_start(gram, rng);
            g_orthogonalize(gram, result.vector, found);
            (void)g_normalize(gram, result.vector);
            found.push_back(std::move(result));
            continue;
        }
        auto phi = random_start(gram, rng);
        g_orthogonalize(gram, phi, found);
        if (!g_normalize(gram, phi)) {
            fail(ErrorCode::NoConvergence, "start vector vanished after deflation");
        }
        double previous = std::numeric_limits<double>::quiet_NaN();
        bool converged = false;
        for (std::size_t it = 1; it <= options.max_iterations; ++it) {
            const Eigen::VectorXd r = op.response(phi);
            const double rho = r.dot(as_vector(phi));
            result.value = rho;
            result.iterations = it;
            result.last_change = std::isnan(previous) ? std::numeric_limits<double>::infinity()
                                                      : std::abs(rho - previous);
            auto next = to_std(op.riesz(r));
            g_orthogonalize(gram, next, found);
            if (!g_normalize(gram, next)) {
                // T phi = 0 on the deflated space: eigenvalue 0
                result.value = 0.0;
                result.last_change = 0.0;
                converged = true;
                break;
            }
            phi = std::move(next);
            if (!std::isnan(previous) && result.last_change <= options.rel_tol * std::abs(rho)) {
                converged = true;
                break;
            }
            previous = rho;
        }
        if (!converged) {
            fail(ErrorCode::NoConvergence, "power iteration did not converge in " +
                                               std::to_string(options.max_iterations) +
                                               " iterations; last estimate " + std::to_string(result.value));
        }
        // Rayleigh quotient of the final (normalized) iterate
        result.value = op.response(phi).dot(as_vector(phi));
        result.vector = std::move(phi);
        found.push_back(std::move(result));
    }
    return found;
}

EigenResult lambda1(const TOperator& op, const EigenOptions& options) {
    return std::move(leading_eigenpairs(op, 1, options).front());
}

double rayleigh_quotient(const TOperator& op, std::span<const double> phi) {
    const double norm2 = op.gram().norm_squared(phi);
    require(norm2 > 0.0, ErrorCode::InvalidArgument, "Rayleigh quotient of a (.,.)~-null vector");
    return op.form(phi, phi) / norm2;
}

MuResult mu(const TOperator& op, const EigenOptions& options) {
    MuResult result;
    if (op.is_zero()) {
        result.value = std::numeric_limits<double>::infinity();
        result.infinite = true;
        return result;
    }
    const TildeGram& gram = op.gram();
    std::mt19937_64 rng(options.seed);
    auto v = op.jump_source(random_start(gram, rng));
    double previous = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t it = 1; it <= options.max_iterations; ++it) {
        const double energy = dirichlet_energy(*v);
        if (!(energy > 0.0)) {
            if (it == 1) {
                result.value = std::numeric_limits<double>::infinity();
                result.infinite = true;
                return result;
            }
            fail(ErrorCode::DegeneratePencil, "iterate lost all energy");
        }
        *v *= 1.0 / std::sqrt(energy);
        const Eigen::VectorXd constraint = op.riesz(op.dual_response(*v));  // Phi_v
        const double denom = constraint.dot(gram.matrix() * constraint);
        if (!(denom > 0.0) || !std::isfinite(denom)) {
            if (it == 1 && denom == 0.0) {
                result.value = std::numeric_limits<double>::infinity();
                result.infinite = true;
                return result;
            }
            fail(ErrorCode::DegeneratePencil, "||Phi_v||~ vanished on the range of the source map");
        }
        const double quotient = 2.0 / denom;
        result.value = quotient;
        result.iterations = it;
        result.last_change = std::isnan(previous) ? std::numeric_limits<double>::infinity()
                                                  : std::abs(quotient - previous);
        if (!std::isnan(previous) && result.last_change <= options.rel_tol * std::abs(quotient)) return result;
        previous = quotient;
        v = op.jump_source(to_std(constraint));
    }
    fail(ErrorCode::NoConvergence, "dual inverse iteration did not converge; last estimate " +
                                       std::to_string(result.value));
}

std::string_view to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::strictly_stable: return "strictly_stable";
        case Verdict::unstable: return "unstable";
        case Verdict::marginal: return "marginal";
    }
    return "marginal";
}

Verdict classify_lambda1(double lambda1, double band) {
    if (lambda1 < 1.0 - band) return Verdict::strictly_stable;
    if (lambda1 > 1.0 + band) return Verdict::unstable;
    return Verdict::marginal;
}

Verdict classify_coercivity(double min_eigenvalue, double band) {
    if (min_eigenvalue > band) return Verdict::strictly_stable;
    if (min_eigenvalue < -band) return Verdict::unstable;
    return Verdict::marginal;
}

}  // namespace msstab
