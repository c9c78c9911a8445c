#include "factprobe/logging.hpp"

#include <iostream>
#include <mutex>

#include <nlohmann/json.hpp>

namespace factprobe {

namespace {

std::mutex g_sink_mutex;

void default_sink(const std::string& line) {
    std::cerr << line << '\n';
}

LogSink& sink_slot() {
    static LogSink sink = default_sink;
    return sink;
}

const char* level_name(LogLevel level) {
    switch (level) {
    case LogLevel::debug: return "debug";
    case LogLevel::info: return "info";
    case LogLevel::warning: return "warning";
    case LogLevel::error: return "error";
    }
    return "info";
}

} // namespace

LogSink set_log_sink(LogSink sink) {
    std::lock_guard<std::mutex> lock(g_sink_mutex);
    LogSink previous = sink_slot();
    sink_slot() = sink ? std::move(sink) : default_sink;
    return previous;
}

void log_event(LogLevel level, const std::string& event,
               const std::map<std::string, std::string>& fields) {
    nlohmann::ordered_json record;
    record["level"] = level_name(level);
    record["event"] = event;
    for (const auto& [key, value] : fields) record[key] = value;

    std::lock_guard<std::mutex> lock(g_sink_mutex);
    sink_slot()(record.dump());
}

} // namespace factprobe
