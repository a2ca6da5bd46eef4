#pragma once

#include <string>

#include <json.hpp>

namespace covquant {

nlohmann::json load_json_file(const std::string& path);

/// Write-to-temp-then-rename, so readers never observe a partial file.
void atomic_write_file(const std::string& path, const std::string& contents);
void atomic_write_json(const std::string& path, const nlohmann::json& j);

} // namespace covquant
