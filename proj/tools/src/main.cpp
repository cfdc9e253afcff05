#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "msstab_app/commands.hpp"

namespace {

using namespace msstab;
using namespace msstab::app;

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::ConfigInvalid, "cannot open output file '" + path + "'");
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Second-variation stability analysis for Mumford-Shah critical pairs", "ms_stability"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::string grid_text;
    std::string restriction_text;
    std::size_t jobs = 1;

    for (const char* name : {"analyze", "phase-diagram", "validate", "compare", "oracle"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON configuration file")->required();
        sub->add_option("--out", out_path, "write the report to this file");
        sub->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--grid", grid_text, "grid override NX,NY");
        sub->add_option("--restriction", restriction_text, "mean_zero | endpoint_zero | none");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_code::ok : exit_code::error;
    }

    try {
        Config config = load_config(config_path);
        Overrides overrides;
        if (!grid_text.empty()) overrides.grid = parse_grid(grid_text);
        if (!restriction_text.empty()) overrides.restriction = parse_restriction(restriction_text);
        if (!out_path.empty()) overrides.out = out_path;
        overrides.seed = seed_from_environment();
        apply_overrides(config, overrides);

        const std::string name = app.get_subcommands().front()->get_name();
        CommandOutput result;
        if (name == "analyze") {
            result = cmd_analyze(config);
        } else if (name == "phase-diagram") {
            result = cmd_phase_diagram(config, jobs);
        } else if (name == "validate") {
            result = cmd_validate(config, jobs);
        } else if (name == "compare") {
            result = cmd_compare(config, jobs);
        } else {
            result = cmd_oracle(config);
        }

        if (config.output_path) {
            write_file(*config.output_path, result.document);
            std::cout << result.table;
        } else {
            std::cout << result.document;
            std::cerr << result.table;
        }
        return result.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code::error;
    }
}
