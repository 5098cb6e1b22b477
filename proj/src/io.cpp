#include "socperc/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "socperc/version.hpp"

namespace socperc {

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << '\n';
    }
}

void write_manifest(const std::string& csv_path, const nlohmann::json& config_echo) {
    nlohmann::json manifest;
    manifest["version"] = kVersion;
    manifest["output"] = csv_path;
    manifest["config"] = config_echo;
    std::ofstream out(csv_path + ".manifest.json");
    if (!out) throw std::runtime_error("cannot open manifest beside '" + csv_path + "'");
    out << manifest.dump(2) << '\n';
}

std::string format_double(double v) {
    std::ostringstream s;
    s.precision(12);
    s << v;
    return s.str();
}

}  // namespace socperc
