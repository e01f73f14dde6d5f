#pragma once

#include <cstdlib>
#include <iostream>
#include <string_view>

namespace mdpu::log {

enum class Level { quiet = 0, info = 1, debug = 2 };

/// Verbosity from MDPU_LOG (debug|info); anything else is quiet.
inline Level level() {
    static const Level lvl = [] {
        const char* v = std::getenv("MDPU_LOG");
        if (!v) return Level::quiet;
        const std::string_view s(v);
        if (s == "debug") return Level::debug;
        if (s == "info") return Level::info;
        return Level::quiet;
    }();
    return lvl;
}

inline void info(std::string_view msg) {
    if (level() >= Level::info) std::cerr << "[info] " << msg << '\n';
}

inline void debug(std::string_view msg) {
    if (level() >= Level::debug) std::cerr << "[debug] " << msg << '\n';
}

}  // namespace mdpu::log
