#pragma once

#include <json.hpp>
#include <string>

namespace jointloss::io {

/// 64-bit FNV-1a of the compact JSON dump (keys are sorted by nlohmann::json),
/// as 16 hex digits.
std::string fingerprint(const nlohmann::json& value);

}  // namespace jointloss::io
