#pragma once

#include <functional>
#include <string>

namespace cmbo {

/// Receives non-fatal diagnostics (CFL hints, smallness flags). The default
/// sink writes "warning: <msg>" to stderr.
using WarningSink = std::function<void(const std::string&)>;

/// Installs a new sink and returns the previous one. Passing an empty
/// function silences warnings.
WarningSink set_warning_sink(WarningSink sink);
void warn(const std::string& message);

}  // namespace cmbo
