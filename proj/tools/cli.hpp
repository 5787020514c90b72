#pragma once

#include <iosfwd>

namespace pnet::cli {

enum ExitCode { ok = 0, usage_error = 1, data_error = 2, internal_error = 3 };

/// Runs one `pnet` invocation. Summaries go to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pnet::cli
