#pragma once

#include <string>
#include <vector>

#include "fluidnet/scenario.h"

namespace fluidnet {

// Built-in scenarios: scenario1 .. scenario8, squarewave, fast, staticlink.
std::vector<std::string> preset_names();
// Throws ConfigError for an unknown name.
Scenario preset(const std::string& name);
bool is_preset(const std::string& name);

}  // namespace fluidnet
