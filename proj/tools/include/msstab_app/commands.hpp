#pragma once

#include <cstddef>
#include <string>

#include "msstab_app/config.hpp"

namespace msstab::app {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int stable = 0;
inline constexpr int error = 1;
inline constexpr int tolerance_exceeded = 2;
inline constexpr int unstable = 3;
inline constexpr int marginal = 4;
}  // namespace exit_code

/// What a subcommand produced: the machine-readable document (JSON or CSV),
/// an optional human-readable table, and the process exit code.
struct CommandOutput {
    std::string document;
    std::string table;
    int exit_code = exit_code::ok;
};

inline constexpr const char* phase_diagram_header = "a,b,lambda1_numeric,lambda1_analytic,verdict,grid_nx,grid_ny,residual";

CommandOutput cmd_analyze(const Config& config);
CommandOutput cmd_phase_diagram(const Config& config, std::size_t jobs);
CommandOutput cmd_validate(const Config& config, std::size_t jobs);
CommandOutput cmd_compare(const Config& config, std::size_t jobs);
CommandOutput cmd_oracle(const Config& config);

/// Locale-independent shortest round-trip of the value to 9 significant digits.
std::string format_number(double value);

}  // namespace msstab::app
