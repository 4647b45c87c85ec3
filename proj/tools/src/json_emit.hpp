#pragma once

#include <string>

#include <json.hpp>

#include "conedet/linalg.hpp"

namespace conedet::cli {

/// Pretty JSON with sorted keys and every double printed as %.17g, so a
/// report parses back to the same bits. Non-finite doubles become null.
std::string emit_json(const nlohmann::json& value);

nlohmann::json complex_json(Complex z);

}  // namespace conedet::cli
