#pragma once

namespace netweave {

enum class LogLevel { Error, Warn, Info, Debug };

/// Threshold for library diagnostics on stderr. Defaults to Warn.
void set_log_level(LogLevel level);

}  // namespace netweave
