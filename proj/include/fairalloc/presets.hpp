#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fairalloc/json_io.hpp"

namespace fairalloc {

/// gaussian100, poisson100, simple100, fbst6, multiresource6.
std::vector<std::string> preset_names();

/// Experiment config (JSON, see json_io.hpp) for a named preset. Throws
/// ConfigError for unknown names.
json preset_config(std::string_view name);

}  // namespace fairalloc
