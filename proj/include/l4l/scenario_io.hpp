#pragma once

#include "l4l/sim.hpp"

#include <filesystem>
#include <string_view>

namespace l4l::sim {

/// Parses the YAML scenario schema documented in docs/formats.md and runs
/// Scenario::validate. Throws Error{InvalidScenario} whose message starts
/// with "line N:" when the problem can be anchored to a line.
Scenario parse_scenario(std::string_view yaml_text);

Scenario load_scenario(const std::filesystem::path& path);

}  // namespace l4l::sim
