#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "msstab/msstab.hpp"

namespace msstab::app {

/// b-periodic profile offset + sum of Fourier terms, used for curve heights
/// and flow directions in configuration files.
struct Profile {
    double offset = 0.0;
    std::vector<FourierTerm> terms;

    [[nodiscard]] std::vector<double> sample(double period, std::size_t nodes) const;
};

enum class GeometryKind { strip, segment };

struct Lattice {
    std::vector<double> a;
    std::vector<double> b;
};

/// Parsed configuration document. Sections: geometry, grid, solver, eigen,
/// validate, output. Unknown keys are rejected with ConfigInvalid naming the key.
struct Config {
    GeometryKind kind = GeometryKind::strip;

    // strip (defaults: the flat pair with u = x+1 above, u = -x below on a = b = 1)
    StripDomain strip{1.0, 1.0, BoundaryTrace{1.0, 1.0, {}}, BoundaryTrace{-1.0, 0.0, {}}};
    Profile curve;
    std::optional<std::vector<double>> curve_heights;
    Lattice lattice;

    // segment
    SegmentConfig segment;
    std::size_t segment_nodes = 64;

    Grid grid;
    SolverOptions solver;
    EigenOptions eigen;
    Restriction restriction = Restriction::mean_zero;
    bool compute_mu = false;
    double band = 0.02;
    std::vector<int> modes{2, 4, 6};

    Profile flow_direction{0.0, {FourierTerm{1, 0.0, 1.0}}};
    ValidationOptions validation;

    std::optional<std::string> output_path;

    /// Discontinuity curve on grid.nx nodes (heights or profile); for the
    /// endpoint_zero restriction node 0 is marked as the endpoint.
    [[nodiscard]] GraphCurve make_curve() const;
    [[nodiscard]] AnalysisOptions analysis_options() const;
    /// True when the closed-form strip eigenvalue applies: flat curve and
    /// linear data with slopes of unit magnitude.
    [[nodiscard]] bool analytic_strip() const;
};

Config parse_config(const nlohmann::json& document);
Config load_config(const std::string& path);

/// Command-line overrides applied after parsing.
struct Overrides {
    std::optional<Grid> grid;
    std::optional<Restriction> restriction;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
};

void apply_overrides(Config& config, const Overrides& overrides);

/// Parses "NX,NY".
Grid parse_grid(const std::string& text);

/// Reads MS_STABILITY_SEED if set.
std::optional<std::uint64_t> seed_from_environment();

}  // namespace msstab::app
