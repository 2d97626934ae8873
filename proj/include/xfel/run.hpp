#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "xfel/config.hpp"

namespace xfel {

inline constexpr int exit_ok = 0;
inline constexpr int exit_error = 1;
inline constexpr int exit_check_failed = 2;

const std::vector<std::string>& subcommand_names();

nlohmann::ordered_json to_json(const RunConfig& cfg);

// Lowercase hex SHA-256 of bytes.
std::string sha256_hex(const std::string& bytes);

// Runs one subcommand, writing artifacts and manifest.json into cfg.output_dir.
// Errors are reported on `log` prefixed with the module that raised them.
int run_subcommand(const std::string& name, const RunConfig& cfg, std::ostream& log);

}  // namespace xfel
