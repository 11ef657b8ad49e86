#pragma once

#include <filesystem>
#include <string>

#include "flocksim/harness.hpp"

// Flat key/value run-configuration files. Three sections mirror RunConfig:
// [task] the mission, [run] loop and planner switches, [llm] endpoint
// settings (only meaningful when planner = llm). Lines starting with '#'
// are comments. Unknown sections or keys are rejected so typos surface
// instead of silently running defaults. The exact key set is pinned by a
// golden test; every run writes its resolved config back in this format.

namespace flocksim {

RunConfig parse_config_text(const std::string& text);
RunConfig load_config_file(const std::filesystem::path& path);

// Canonical rendering: every key in a fixed order, [llm] only when set.
std::string serialize_config(const RunConfig& config);

}  // namespace flocksim
