#pragma once

#include <string_view>

namespace alns {

enum class LogLevel { debug, info, warning, error };

/// Messages below this level are dropped. Defaults to info.
void set_log_level(LogLevel level);
/// Thread-safe line-oriented logging to stderr.
void log(LogLevel level, std::string_view message);

inline void log_info(std::string_view message) { log(LogLevel::info, message); }
inline void log_warning(std::string_view message) { log(LogLevel::warning, message); }

}  // namespace alns
