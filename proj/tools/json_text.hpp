#pragma once

#include <nlohmann/json.hpp>

#include <string>

namespace rellich::cli {

using Json = nlohmann::ordered_json;

/// Serializes with every floating-point number at 17 significant digits so values
/// round-trip bit-exactly.  Non-finite numbers become null.
std::string to_json_text(const Json& j, int indent = 2);

}  // namespace rellich::cli
