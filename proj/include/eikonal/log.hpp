#pragma once

#include <iostream>
#include <sstream>
#include <string>

namespace eikonal::log {

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

/// Threshold read once from EIKONAL_LOG (error|warn|info|debug); default warn.
Level threshold();

inline bool enabled(Level l) { return static_cast<int>(l) <= static_cast<int>(threshold()); }

void write(Level l, const std::string& message);

template <typename... Args>
void emit(Level l, const Args&... args) {
    if (!enabled(l)) return;
    std::ostringstream os;
    (os << ... << args);
    write(l, os.str());
}

template <typename... Args> void debug(const Args&... a) { emit(Level::debug, a...); }
template <typename... Args> void info(const Args&... a) { emit(Level::info, a...); }
template <typename... Args> void warn(const Args&... a) { emit(Level::warn, a...); }

}  // namespace eikonal::log
