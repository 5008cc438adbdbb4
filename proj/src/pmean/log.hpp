#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace pmean {

enum class LogLevel { error = 0, info = 1, debug = 2 };

// Controlled by PMEAN_LOG={error|info|debug}; default error.
inline LogLevel log_level() {
    static LogLevel level = [] {
        const char* env = std::getenv("PMEAN_LOG");
        if (env == nullptr) return LogLevel::error;
        if (std::strcmp(env, "debug") == 0) return LogLevel::debug;
        if (std::strcmp(env, "info") == 0) return LogLevel::info;
        return LogLevel::error;
    }();
    return level;
}

inline void log(LogLevel lvl, const std::string& msg) {
    if (lvl > log_level()) return;
    const char* tag = lvl == LogLevel::error ? "error" : (lvl == LogLevel::info ? "info" : "debug");
    std::fprintf(stderr, "[pmean %s] %s\n", tag, msg.c_str());
}

} // namespace pmean
