#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace lbnn::cli {

// Exit statuses.
inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_stagnated = 2;
inline constexpr int exit_capped = 3;

// Flat "key = value" lines ('#' starts a comment) turned into "--key=value"
// arguments. Keys are the long flag names without dashes.
std::vector<std::string> config_arguments(const std::filesystem::path& path);

// Entry point for the lbnn tool; returns the process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace lbnn::cli
