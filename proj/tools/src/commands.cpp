#include "msstab_app/commands.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <optional>
#include <numbers>
#include <sstream>
#include <thread>
#include <vector>

namespace msstab::app {

namespace {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

ordered quantity(double value, const char* provenance) {
    ordered q;
    q["value"] = std::isfinite(value) ? ordered(value) : ordered(nullptr);
    q["provenance"] = provenance;
    if (!std::isfinite(value)) q["infinite"] = true;
    return q;
}

ordered solve_stats(const SolveStats& s) {
    return ordered{{"iterations", s.iterations}, {"residual", s.residual}, {"tolerance", s.tolerance}};
}

ordered grid_json(const Grid& g, std::size_t curve_nodes) {
    return ordered{{"nx", g.nx}, {"ny", g.ny}, {"curve_nodes", curve_nodes}};
}

// Runs task(i) for i in [0, n) on up to `jobs` threads; the first failure by
// index order is rethrown after all workers finish.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& task) {
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                task(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t threads = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(n, 1));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

std::string dump(const ordered& doc) { return doc.dump(2) + "\n"; }

void require_strip(const Config& c, const char* command) {
    if (c.kind != GeometryKind::strip) {
        fail(ErrorCode::ConfigInvalid, std::string("'geometry.type': ") + command + " needs a strip geometry");
    }
}

void require_analytic(const Config& c, const char* command) {
    require_strip(c, command);
    if (!c.analytic_strip()) {
        fail(ErrorCode::ConfigInvalid, std::string("'geometry': ") + command +
                                           " needs the flat strip with linear data of unit slopes");
    }
}

int exit_for(Verdict v) {
    switch (v) {
        case Verdict::strictly_stable: return exit_code::stable;
        case Verdict::unstable: return exit_code::unstable;
        case Verdict::marginal: return exit_code::marginal;
    }
    return exit_code::error;
}

std::vector<double> cosine_mode(int n, double period, std::size_t nodes) {
    std::vector<double> phi(nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
        phi[i] = std::cos(n * std::numbers::pi * static_cast<double>(i) / static_cast<double>(nodes));
    }
    (void)period;
    return phi;
}

struct ModeMeasurement {
    double rayleigh = 0.0;
    double field_error = 0.0;
};

// Rayleigh quotient of cos(n pi x / b) and the L2 error of its jump-source
// field against the separated solution, on one grid.
ModeMeasurement measure_mode(const Config& c, int n, const Grid& grid) {
    const StripDomain& d = c.strip;
    const GraphCurve curve = GraphCurve::flat(d.period, grid.nx, 0.0);
    auto [state, stats] = solve_state(d, curve, grid, c.solver);
    const TOperator op(d, curve, state, grid, assemble_tilde_gram(curve, Restriction::mean_zero), c.solver);
    const auto phi = cosine_mode(n, d.period, grid.nx);
    ModeMeasurement m;
    m.rayleigh = rayleigh_quotient(op, phi);

    const auto v = op.jump_source(phi);
    const double k = n * std::numbers::pi / d.period;
    const SlitField reference = strip_mode_field(n, 1.0 / std::cosh(k * d.half_height), d.half_height, d.period, grid);
    const double hx = d.period / static_cast<double>(grid.nx);
    const double hy = d.half_height / static_cast<double>(grid.ny);
    double sum = 0.0;
    for (Side side : {Side::plus, Side::minus}) {
        // v^+ scales with the upper slope, v^- with minus the lower slope
        const double sign = side == Side::plus ? d.top.slope : -d.bottom.slope;
        const auto got = v->values(side);
        const auto want = reference.values(side);
        for (std::size_t idx = 0; idx < got.size(); ++idx) {
            const double e = got[idx] - sign * want[idx];
            sum += e * e;
        }
    }
    m.field_error = std::sqrt(sum * hx * hy);
    return m;
}

double observed_order(double coarse_error, double fine_error) {
    if (!(coarse_error > 0.0) || !(fine_error > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return std::log2(coarse_error / fine_error);
}

}  // namespace

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buffer[64];
    const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::general, 9);
    if (ec != std::errc{}) return "nan";
    return std::string(buffer, end);
}

CommandOutput cmd_analyze(const Config& config) {
    CommandOutput out;
    ordered doc;
    doc["command"] = "analyze";
    StabilityReport report;
    ordered geometry;
    std::optional<double> analytic;
    if (config.kind == GeometryKind::strip) {
        const GraphCurve curve = config.make_curve();
        report = analyze_strip(config.strip, curve, config.analysis_options());
        geometry = {{"type", "strip"}, {"half_height", config.strip.half_height}, {"period", config.strip.period}};
        if (config.analytic_strip()) analytic = lambda1_strip(config.strip.half_height, config.strip.period);
    } else {
        report = analyze_segment(config.segment, config.segment_nodes, config.analysis_options());
        geometry = {{"type", "segment"},
                    {"length", config.segment.length},
                    {"h1", config.segment.h1},
                    {"h2", config.segment.h2}};
    }
    doc["geometry"] = geometry;
    doc["grid"] = grid_json(report.grid, report.curve_nodes);
    doc["restriction"] = std::string(to_string(report.restriction));
    ordered l1 = quantity(report.lambda1, "numeric");
    l1["iterations"] = report.lambda1_iterations;
    l1["last_change"] = std::isfinite(report.lambda1_last_change) ? ordered(report.lambda1_last_change)
                                                                  : ordered(nullptr);
    doc["lambda1"] = l1;
    if (analytic) doc["lambda1_analytic"] = quantity(*analytic, "analytic");
    if (report.mu) {
        ordered m = quantity(report.mu->value, "numeric");
        m["iterations"] = report.mu->iterations;
        doc["mu"] = m;
    }
    if (report.coercivity) doc["coercivity"] = quantity(*report.coercivity, "numeric");
    doc["verdict"] = std::string(to_string(report.verdict));
    doc["band"] = report.band;
    ordered crit;
    crit["transmission_sup"] = quantity(report.criticality.transmission_sup, "numeric");
    crit["min_jump"] = quantity(report.criticality.min_jump, "numeric");
    crit["min_jump_x"] = report.criticality.min_jump_x;
    if (report.criticality.orthogonality_defect) {
        crit["orthogonality_defect"] = quantity(*report.criticality.orthogonality_defect, "numeric");
    }
    doc["criticality"] = crit;
    doc["solver"] = ordered{{"state", solve_stats(report.state_stats)}, {"operator", solve_stats(report.operator_stats)}};
    out.document = dump(doc);

    std::ostringstream t;
    t << pad("quantity", 22) << pad("value", 18) << "provenance\n";
    t << pad("lambda1", 22) << pad(format_number(report.lambda1), 18) << "numeric\n";
    if (analytic) t << pad("lambda1", 22) << pad(format_number(*analytic), 18) << "analytic\n";
    if (report.mu) t << pad("mu", 22) << pad(format_number(report.mu->value), 18) << "numeric\n";
    if (report.coercivity) t << pad("coercivity", 22) << pad(format_number(*report.coercivity), 18) << "numeric\n";
    t << pad("transmission_sup", 22) << pad(format_number(report.criticality.transmission_sup), 18) << "numeric\n";
    t << pad("min_jump", 22) << pad(format_number(report.criticality.min_jump), 18) << "numeric\n";
    t << pad("verdict", 22) << to_string(report.verdict) << "\n";
    out.table = t.str();
    out.exit_code = exit_for(report.verdict);
    return out;
}

CommandOutput cmd_phase_diagram(const Config& config, std::size_t jobs) {
    require_strip(config, "phase-diagram");
    struct Row {
        double a = 0, b = 0, numeric = 0, analytic = 0, residual = 0;
        Verdict verdict = Verdict::marginal;
    };
    const auto& la = config.lattice.a;
    const auto& lb = config.lattice.b;
    std::vector<Row> rows(la.size() * lb.size());
    parallel_for(rows.size(), jobs, [&](std::size_t k) {
        Row& row = rows[k];
        row.a = la[k / lb.size()];
        row.b = lb[k % lb.size()];
        StripDomain d = config.strip;
        d.half_height = row.a;
        d.period = row.b;
        const StabilityReport r =
            analyze_strip(d, GraphCurve::flat(row.b, config.grid.nx), config.analysis_options());
        row.numeric = r.lambda1;
        row.analytic = lambda1_strip(row.a, row.b);
        row.verdict = r.verdict;
        row.residual = r.criticality.transmission_sup;
    });
    std::ostringstream csv;
    csv << phase_diagram_header << "\n";
    for (const Row& row : rows) {
        csv << format_number(row.a) << ',' << format_number(row.b) << ',' << format_number(row.numeric) << ','
            << format_number(row.analytic) << ',' << to_string(row.verdict) << ',' << config.grid.nx << ','
            << config.grid.ny << ',' << format_number(row.residual) << "\n";
    }
    CommandOutput out;
    out.document = csv.str();
    return out;
}

CommandOutput cmd_validate(const Config& config, std::size_t jobs) {
    require_strip(config, "validate");
    const GraphCurve curve = config.make_curve();
    const auto [state, stats] = solve_state(config.strip, curve, config.grid, config.solver);
    const auto direction = config.flow_direction.sample(config.strip.period, config.grid.nx);
    ValidationOptions options = config.validation;
    options.jobs = std::max<std::size_t>(jobs, 1);
    const ValidationReport r =
        validate_second_variation(config.strip, curve, state, direction, config.grid, config.solver, options);

    ordered doc;
    doc["command"] = "validate";
    doc["grid"] = grid_json(config.grid, curve.size());
    doc["times"] = r.times;
    ordered samples = ordered::array();
    for (double g : r.samples) samples.push_back(quantity(g, "numeric"));
    doc["energy_samples"] = samples;
    doc["base_energy"] = quantity(r.base_energy, "numeric");
    doc["first_derivative"] = quantity(r.fd.first, "fd");
    doc["first_derivative_error"] = quantity(r.fd.first_error, "fd");
    doc["second_derivative"] = quantity(r.fd.second, "fd");
    doc["second_derivative_error"] = quantity(r.fd.second_error, "fd");
    doc["assembled_second_variation"] = quantity(r.assembled.direct, "numeric");
    doc["assembled_second_variation_operator_route"] = quantity(r.assembled.via_operator, "numeric");
    doc["mismatch"] = quantity(r.mismatch, "numeric");
    doc["critical"] = r.critical;
    doc["transmission_sup"] = quantity(r.criticality.transmission_sup, "numeric");
    doc["first_variation_ok"] = r.first_variation_ok;
    doc["second_variation_ok"] = r.second_variation_ok;
    doc["tolerances"] = ordered{{"first_variation", options.first_variation_tol},
                                {"second_variation", options.second_variation_tol},
                                {"transmission", options.transmission_tol}};
    doc["passed"] = r.passed();

    CommandOutput out;
    out.document = dump(doc);
    std::ostringstream t;
    t << pad("g(0)", 30) << format_number(r.base_energy) << "\n"
      << pad("g'(0) [fd]", 30) << format_number(r.fd.first) << " +- " << format_number(r.fd.first_error) << "\n"
      << pad("g''(0) [fd]", 30) << format_number(r.fd.second) << " +- " << format_number(r.fd.second_error) << "\n"
      << pad("second variation [numeric]", 30) << format_number(r.assembled.direct) << "\n"
      << pad("relative mismatch", 30) << format_number(r.mismatch) << "\n"
      << pad("critical pair", 30) << (r.critical ? "yes" : "no") << "\n"
      << pad("result", 30) << (r.passed() ? "pass" : "fail") << "\n";
    out.table = t.str();
    out.exit_code = r.passed() ? exit_code::ok : exit_code::tolerance_exceeded;
    return out;
}

CommandOutput cmd_compare(const Config& config, std::size_t jobs) {
    for (int n : config.modes) (void)mode_lambda(n, 1.0, 1.0);  // OddMode before any work
    require_analytic(config, "compare");
    const Grid fine = config.grid;
    const Grid coarse{fine.nx / 2, fine.ny / 2};
    coarse.validate();

    const std::size_t count = config.modes.size();
    std::vector<ModeMeasurement> at_fine(count), at_coarse(count);
    parallel_for(2 * count, jobs, [&](std::size_t k) {
        const int n = config.modes[k % count];
        if (k < count) {
            at_fine[k] = measure_mode(config, n, fine);
        } else {
            at_coarse[k - count] = measure_mode(config, n, coarse);
        }
    });

    ordered rows = ordered::array();
    std::ostringstream t;
    t << pad("quantity", 16) << pad("n", 4) << pad("numeric", 16) << pad("analytic", 16) << pad("rel_error", 16)
      << "order\n";
    const double scale = 0.5 * (config.strip.top.slope * config.strip.top.slope +
                                config.strip.bottom.slope * config.strip.bottom.slope);
    for (std::size_t k = 0; k < count; ++k) {
        const int n = config.modes[k];
        const double exact = scale * mode_lambda(n, config.strip.half_height, config.strip.period);
        const double err_f = std::abs(at_fine[k].rayleigh - exact) / exact;
        const double err_c = std::abs(at_coarse[k].rayleigh - exact) / exact;
        ordered row;
        row["quantity"] = "mode_lambda";
        row["n"] = n;
        row["numeric"] = quantity(at_fine[k].rayleigh, "numeric");
        row["analytic"] = quantity(exact, "analytic");
        row["relative_error"] = err_f;
        row["coarse_relative_error"] = err_c;
        const double order = observed_order(err_c, err_f);
        row["order"] = std::isfinite(order) ? ordered(order) : ordered(nullptr);
        rows.push_back(row);
        t << pad("mode_lambda", 16) << pad(std::to_string(n), 4) << pad(format_number(at_fine[k].rayleigh), 16)
          << pad(format_number(exact), 16) << pad(format_number(err_f), 16) << format_number(order) << "\n";
    }
    for (std::size_t k = 0; k < count; ++k) {
        const int n = config.modes[k];
        ordered row;
        row["quantity"] = "field_l2_error";
        row["n"] = n;
        row["numeric"] = quantity(at_fine[k].field_error, "numeric");
        row["coarse"] = quantity(at_coarse[k].field_error, "numeric");
        const double order = observed_order(at_coarse[k].field_error, at_fine[k].field_error);
        row["order"] = std::isfinite(order) ? ordered(order) : ordered(nullptr);
        rows.push_back(row);
        t << pad("field_l2_error", 16) << pad(std::to_string(n), 4) << pad(format_number(at_fine[k].field_error), 16)
          << pad("-", 16) << pad("-", 16) << format_number(order) << "\n";
    }
    ordered doc;
    doc["command"] = "compare";
    doc["grid"] = grid_json(fine, fine.nx);
    doc["coarse_grid"] = grid_json(coarse, coarse.nx);
    doc["rows"] = rows;
    CommandOutput out;
    out.document = dump(doc);
    out.table = t.str();
    return out;
}

CommandOutput cmd_oracle(const Config& config) {
    ordered doc;
    doc["command"] = "oracle";
    std::ostringstream t;
    if (config.kind == GeometryKind::strip) {
        const double a = config.strip.half_height, b = config.strip.period;
        const double l1 = lambda1_strip(a, b);
        doc["half_height"] = a;
        doc["period"] = b;
        doc["lambda1"] = quantity(l1, "analytic");
        doc["verdict"] = std::string(to_string(l1 < 1.0 ? Verdict::strictly_stable : Verdict::unstable));
        ordered modes = ordered::array();
        t << pad("lambda1", 16) << format_number(l1) << "\n";
        for (int n : config.modes) {
            const double v = mode_lambda(n, a, b);
            ordered m = quantity(v, "analytic");
            m["n"] = n;
            modes.push_back(m);
            t << pad("mode n=" + std::to_string(n), 16) << format_number(v) << "\n";
        }
        doc["modes"] = modes;
    } else {
        const auto& s = config.segment;
        const double e = segment_min_eig(s.length, s.h1, s.h2, config.segment_nodes);
        doc["length"] = s.length;
        doc["h1"] = s.h1;
        doc["h2"] = s.h2;
        doc["second_variation_of_one"] = quantity(-s.h1 - s.h2, "analytic");
        doc["segment_min_eig"] = quantity(e, "numeric");
        doc["verdict"] = std::string(to_string(classify_coercivity(e)));
        t << pad("d2F[1]", 16) << format_number(-s.h1 - s.h2) << "\n"
          << pad("min eig", 16) << format_number(e) << "\n";
    }
    CommandOutput out;
    out.document = dump(doc);
    out.table = t.str();
    return out;
}

}  // namespace msstab::app
