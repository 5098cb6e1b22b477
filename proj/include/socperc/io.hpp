#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace socperc {

// CSV with a header row; values are written verbatim.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

// Run manifest (config echo + seed + version) written beside a CSV as
// "<path>.manifest.json".
void write_manifest(const std::string& csv_path, const nlohmann::json& config_echo);

std::string format_double(double v);

}  // namespace socperc
