#pragma once

#include <iosfwd>

namespace geoscore::cli {

/// Process exit statuses.
enum ExitCode : int {
    kOk = 0,
    kDataError = 1,   ///< validation, integrity or computation failure
    kUsageError = 2,  ///< bad flags or unreadable files
};

/// Runs the `geoscore` command line in-process. Reports go to `out` (or --output),
/// diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace geoscore::cli
