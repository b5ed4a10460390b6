#pragma once

// Command-line front end. run() is the whole program minus process setup,
// so tests can drive it in-process.

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace cliffbell::app {

inline constexpr const char* kSchema = "cliffbell-1";

enum ExitCode : int { kPass = 0, kCheckFailure = 1, kUsageError = 2 };

/// Radians by default; a trailing "deg" switches to degrees.
/// Throws std::invalid_argument on malformed input.
double parse_angle(std::string_view text);

/// Comma-separated angles. Throws std::invalid_argument if empty.
std::vector<double> parse_angle_list(std::string_view text);

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cliffbell::app
