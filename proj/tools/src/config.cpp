#include "msstab_app/config.hpp"

#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <set>
#include <string_view>

namespace msstab::app {

namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& key, const std::string& what) {
    fail(ErrorCode::ConfigInvalid, "'" + key + "': " + what);
}

void check_keys(const json& object, const std::string& where, std::initializer_list<std::string_view> allowed) {
    if (!object.is_object()) invalid(where, "expected an object");
    for (const auto& [key, value] : object.items()) {
        bool known = false;
        for (auto a : allowed) known = known || a == key;
        if (!known) invalid(where.empty() ? key : where + "." + key, "unknown key");
    }
}

double number(const json& object, const std::string& where, const char* key, double fallback) {
    if (!object.contains(key)) return fallback;
    const json& v = object.at(key);
    if (!v.is_number()) invalid(where + "." + key, "expected a number");
    return v.get<double>();
}

std::size_t count(const json& object, const std::string& where, const char* key, std::size_t fallback) {
    if (!object.contains(key)) return fallback;
    const json& v = object.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) invalid(where + "." + key, "expected a non-negative integer");
    return v.get<std::size_t>();
}

bool flag(const json& object, const std::string& where, const char* key, bool fallback) {
    if (!object.contains(key)) return fallback;
    const json& v = object.at(key);
    if (!v.is_boolean()) invalid(where + "." + key, "expected true or false");
    return v.get<bool>();
}

std::vector<double> numbers(const json& v, const std::string& where) {
    if (!v.is_array()) invalid(where, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) invalid(where, "expected an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

std::vector<FourierTerm> parse_terms(const json& v, const std::string& where) {
    if (!v.is_array()) invalid(where, "expected an array of {k, cos, sin}");
    std::vector<FourierTerm> out;
    for (std::size_t n = 0; n < v.size(); ++n) {
        const std::string at = where + "[" + std::to_string(n) + "]";
        check_keys(v[n], at, {"k", "cos", "sin"});
        FourierTerm t;
        if (!v[n].contains("k") || !v[n]["k"].is_number_integer() || v[n]["k"].get<int>() < 1) {
            invalid(at + ".k", "expected an integer wavenumber >= 1");
        }
        t.wavenumber = v[n]["k"].get<int>();
        t.cos_coeff = number(v[n], at, "cos", 0.0);
        t.sin_coeff = number(v[n], at, "sin", 0.0);
        out.push_back(t);
    }
    return out;
}

BoundaryTrace parse_trace(const json& v, const std::string& where) {
    check_keys(v, where, {"slope", "offset", "terms"});
    BoundaryTrace t;
    t.slope = number(v, where, "slope", 0.0);
    t.offset = number(v, where, "offset", 0.0);
    if (v.contains("terms")) t.terms = parse_terms(v["terms"], where + ".terms");
    return t;
}

Profile parse_profile(const json& v, const std::string& where, Profile fallback) {
    check_keys(v, where, {"offset", "terms"});
    Profile p = fallback;
    p.offset = number(v, where, "offset", fallback.offset);
    if (v.contains("terms")) p.terms = parse_terms(v["terms"], where + ".terms");
    return p;
}

void parse_geometry(const json& g, Config& c) {
    check_keys(g, "geometry",
               {"type", "half_height", "period", "dirichlet_top", "dirichlet_bottom", "curve", "lattice", "length",
                "h1", "h2", "nodes"});
    const std::string type = g.contains("type") ? g["type"].get<std::string>() : "strip";
    if (type == "strip") {
        c.kind = GeometryKind::strip;
        for (const char* key : {"length", "h1", "h2", "nodes"}) {
            if (g.contains(key)) invalid(std::string("geometry.") + key, "only valid for type 'segment'");
        }
        c.strip.half_height = number(g, "geometry", "half_height", c.strip.half_height);
        c.strip.period = number(g, "geometry", "period", c.strip.period);
        if (g.contains("dirichlet_top")) c.strip.top = parse_trace(g["dirichlet_top"], "geometry.dirichlet_top");
        if (g.contains("dirichlet_bottom")) {
            c.strip.bottom = parse_trace(g["dirichlet_bottom"], "geometry.dirichlet_bottom");
        }
        if (g.contains("curve")) {
            const json& cv = g["curve"];
            check_keys(cv, "geometry.curve", {"offset", "terms", "heights"});
            if (cv.contains("heights")) {
                if (cv.contains("offset") || cv.contains("terms")) {
                    invalid("geometry.curve.heights", "give either heights or offset/terms");
                }
                c.curve_heights = numbers(cv["heights"], "geometry.curve.heights");
            } else {
                c.curve = parse_profile(cv, "geometry.curve", Profile{});
            }
        }
        if (g.contains("lattice")) {
            const json& l = g["lattice"];
            check_keys(l, "geometry.lattice", {"a", "b"});
            if (l.contains("a")) c.lattice.a = numbers(l["a"], "geometry.lattice.a");
            if (l.contains("b")) c.lattice.b = numbers(l["b"], "geometry.lattice.b");
            for (double v : c.lattice.a) {
                if (!(v > 0.0)) invalid("geometry.lattice.a", "values must be positive");
            }
            for (double v : c.lattice.b) {
                if (!(v > 0.0)) invalid("geometry.lattice.b", "values must be positive");
            }
        }
        if (!(c.strip.half_height > 0.0)) invalid("geometry.half_height", "must be positive");
        if (!(c.strip.period > 0.0)) invalid("geometry.period", "must be positive");
    } else if (type == "segment") {
        c.kind = GeometryKind::segment;
        for (const char* key : {"half_height", "period", "dirichlet_top", "dirichlet_bottom", "curve", "lattice"}) {
            if (g.contains(key)) invalid(std::string("geometry.") + key, "only valid for type 'strip'");
        }
        c.segment.length = number(g, "geometry", "length", 1.0);
        c.segment.h1 = number(g, "geometry", "h1", 0.0);
        c.segment.h2 = number(g, "geometry", "h2", 0.0);
        c.segment_nodes = count(g, "geometry", "nodes", c.segment_nodes);
        if (!(c.segment.length > 0.0)) invalid("geometry.length", "must be positive");
        if (c.segment_nodes < 16) invalid("geometry.nodes", "must be at least 16");
    } else {
        invalid("geometry.type", "expected 'strip' or 'segment', got '" + type + "'");
    }
}

Config parse_document(const json& document);

}  // namespace

std::vector<double> Profile::sample(double period, std::size_t nodes) const {
    BoundaryTrace trace{0.0, offset, terms};
    std::vector<double> out(nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
        out[i] = trace.periodic_part(static_cast<double>(i) * period / static_cast<double>(nodes), period);
    }
    return out;
}

GraphCurve Config::make_curve() const {
    std::vector<double> heights = curve_heights ? *curve_heights : curve.sample(strip.period, grid.nx);
    if (heights.size() != grid.nx) {
        invalid("geometry.curve.heights", "has " + std::to_string(heights.size()) + " samples but grid.nx is " +
                                              std::to_string(grid.nx));
    }
    GraphCurve out(strip.period, std::move(heights));
    return restriction == Restriction::endpoint_zero ? out.with_endpoint(0) : out;
}

AnalysisOptions Config::analysis_options() const {
    AnalysisOptions o;
    o.grid = grid;
    o.solver = solver;
    o.eigen = eigen;
    o.restriction = restriction;
    o.compute_mu = compute_mu;
    o.band = band;
    return o;
}

bool Config::analytic_strip() const {
    if (kind != GeometryKind::strip) return false;
    if (!strip.top.terms.empty() || !strip.bottom.terms.empty()) return false;
    if (std::abs(strip.top.slope) != 1.0 || std::abs(strip.bottom.slope) != 1.0) return false;
    const auto heights = curve_heights ? *curve_heights : curve.sample(strip.period, grid.nx);
    for (double h : heights) {
        if (h != heights.front()) return false;
    }
    return true;
}

namespace {

Config parse_document(const json& document) {
    Config c;
    check_keys(document, "", {"geometry", "grid", "solver", "eigen", "validate", "output"});
    if (document.contains("geometry")) parse_geometry(document["geometry"], c);

    if (document.contains("grid")) {
        const json& g = document["grid"];
        check_keys(g, "grid", {"nx", "ny"});
        c.grid.nx = count(g, "grid", "nx", c.grid.nx);
        c.grid.ny = count(g, "grid", "ny", c.grid.ny);
    }
    if (c.grid.nx < Grid::min_nodes || c.grid.ny < Grid::min_nodes) {
        invalid("grid", "nx and ny must be at least " + std::to_string(Grid::min_nodes));
    }

    if (document.contains("solver")) {
        const json& s = document["solver"];
        check_keys(s, "solver", {"rel_tol", "max_iter_factor"});
        c.solver.rel_tol = number(s, "solver", "rel_tol", c.solver.rel_tol);
        c.solver.max_iter_factor = number(s, "solver", "max_iter_factor", c.solver.max_iter_factor);
        if (!(c.solver.rel_tol > 0.0)) invalid("solver.rel_tol", "must be positive");
        if (!(c.solver.max_iter_factor > 0.0)) invalid("solver.max_iter_factor", "must be positive");
    }

    if (document.contains("eigen")) {
        const json& e = document["eigen"];
        check_keys(e, "eigen", {"restriction", "rel_tol", "max_iterations", "seed", "compute_mu", "band", "modes"});
        if (e.contains("restriction")) {
            if (!e["restriction"].is_string()) invalid("eigen.restriction", "expected a string");
            try {
                c.restriction = parse_restriction(e["restriction"].get<std::string>());
            } catch (const Error& err) {
                invalid("eigen.restriction", err.what());
            }
        }
        c.eigen.rel_tol = number(e, "eigen", "rel_tol", c.eigen.rel_tol);
        c.eigen.max_iterations = count(e, "eigen", "max_iterations", c.eigen.max_iterations);
        if (e.contains("seed")) {
            if (!e["seed"].is_number_unsigned()) invalid("eigen.seed", "expected a non-negative integer");
            c.eigen.seed = e["seed"].get<std::uint64_t>();
        }
        c.compute_mu = flag(e, "eigen", "compute_mu", c.compute_mu);
        c.band = number(e, "eigen", "band", c.band);
        if (e.contains("modes")) {
            c.modes.clear();
            if (!e["modes"].is_array()) invalid("eigen.modes", "expected an array of integers");
            for (const auto& m : e["modes"]) {
                if (!m.is_number_integer()) invalid("eigen.modes", "expected an array of integers");
                c.modes.push_back(m.get<int>());
            }
        }
        if (!(c.eigen.rel_tol > 0.0)) invalid("eigen.rel_tol", "must be positive");
        if (!(c.band >= 0.0)) invalid("eigen.band", "must be non-negative");
    }

    if (document.contains("validate")) {
        const json& v = document["validate"];
        check_keys(v, "validate",
                   {"direction", "small_step", "large_step", "first_variation_tol", "second_variation_tol",
                    "transmission_tol"});
        if (v.contains("direction")) c.flow_direction = parse_profile(v["direction"], "validate.direction", Profile{});
        auto& o = c.validation;
        o.small_step = number(v, "validate", "small_step", o.small_step);
        o.large_step = number(v, "validate", "large_step", o.large_step);
        o.first_variation_tol = number(v, "validate", "first_variation_tol", o.first_variation_tol);
        o.second_variation_tol = number(v, "validate", "second_variation_tol", o.second_variation_tol);
        o.transmission_tol = number(v, "validate", "transmission_tol", o.transmission_tol);
        if (!(o.small_step > 0.0 && o.large_step > o.small_step)) {
            invalid("validate.large_step", "steps must satisfy 0 < small_step < large_step");
        }
    }

    if (document.contains("output")) {
        const json& o = document["output"];
        check_keys(o, "output", {"path"});
        if (o.contains("path")) {
            if (!o["path"].is_string()) invalid("output.path", "expected a string");
            c.output_path = o["path"].get<std::string>();
        }
    }
    return c;
}

}  // namespace

Config parse_config(const json& document) {
    try {
        return parse_document(document);
    } catch (const json::exception& e) {
        fail(ErrorCode::ConfigInvalid, std::string("type error: ") + e.what());
    }
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::ConfigInvalid, "cannot open config file '" + path + "'");
    json document;
    try {
        document = json::parse(in);
    } catch (const json::exception& e) {
        fail(ErrorCode::ConfigInvalid, "'" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(document);
}

void apply_overrides(Config& config, const Overrides& overrides) {
    if (overrides.grid) {
        overrides.grid->validate();
        config.grid = *overrides.grid;
    }
    if (overrides.restriction) config.restriction = *overrides.restriction;
    if (overrides.out) config.output_path = *overrides.out;
    if (overrides.seed) config.eigen.seed = *overrides.seed;
}

Grid parse_grid(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) fail(ErrorCode::ConfigInvalid, "--grid expects NX,NY, got '" + text + "'");
    try {
        std::size_t used = 0;
        const auto nx = std::stoul(text.substr(0, comma), &used);
        if (used != comma) throw std::invalid_argument("nx");
        const std::string rest = text.substr(comma + 1);
        const auto ny = std::stoul(rest, &used);
        if (used != rest.size()) throw std::invalid_argument("ny");
        Grid g{nx, ny};
        g.validate();
        return g;
    } catch (const std::logic_error&) {
        fail(ErrorCode::ConfigInvalid, "--grid expects NX,NY, got '" + text + "'");
    }
}

std::optional<std::uint64_t> seed_from_environment() {
    const char* raw = std::getenv("MS_STABILITY_SEED");
    if (raw == nullptr || *raw == '\0') return std::nullopt;
    try {
        std::size_t used = 0;
        const std::string text(raw);
        const auto value = std::stoull(text, &used);
        if (used != text.size()) throw std::invalid_argument("seed");
        return value;
    } catch (const std::logic_error&) {
        fail(ErrorCode::ConfigInvalid, "MS_STABILITY_SEED must be a non-negative integer");
    }
}

}  // namespace msstab::app
