#pragma once

#include <functional>
#include <map>
#include <string>

namespace factprobe {

enum class LogLevel { debug, info, warning, error };

using LogSink = std::function<void(const std::string& json_line)>;

// Replaces the process-wide sink (default: one JSON object per line on stderr).
// Pass nullptr to restore the default. Returns the previous sink.
LogSink set_log_sink(LogSink sink);

// Emits one machine-readable event: {"level": ..., "event": ..., <fields>}.
void log_event(LogLevel level, const std::string& event,
               const std::map<std::string, std::string>& fields = {});

} // namespace factprobe
