// Command orchestration behind the ccmnav tool: loading or generating the
// scenario, applying --set parameter overrides, running the requested
// command, and writing the output files plus a sidecar with the effective
// parameters of the run.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ccm/core.hpp"

namespace ccm {

enum class Command { plan, simulate, ensemble, calibrate };

struct RunConfig {
    Command command = Command::plan;
    std::string scenario_path;  // mutually exclusive with template_name
    std::string template_name;
    std::string mode = "both";  // avus | cous | both
    int runs = 1;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::vector<std::pair<std::string, std::string>> overrides;  // --set key=value
    bool timestamp = true;
};

// Executes the command; returns the process exit code (0 success, 1 config
// error, 2 numerical failure). Error text goes to err.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace ccm
