#pragma once

#include <iosfwd>
#include <string>

#include "morphic/report.hpp"

namespace morphic {

/// Exit codes: 0 every check passed, 1 a check failed, 2 input or usage error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Stable JSON form of a report (no timing, no file paths), newline-terminated.
std::string report_json(const Report& r);
std::string report_text(const Report& r);

}  // namespace morphic
