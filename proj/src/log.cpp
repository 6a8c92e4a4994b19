#include "eikonal/log.hpp"

#include <cstdlib>
#include <mutex>
#include <string_view>

namespace eikonal::log {

Level threshold() {
    static const Level level = [] {
        const char* env = std::getenv("EIKONAL_LOG");
        std::string_view v = env ? env : "";
        if (v == "error") return Level::error;
        if (v == "info") return Level::info;
        if (v == "debug") return Level::debug;
        return Level::warn;
    }();
    return level;
}

void write(Level l, const std::string& message) {
    static std::mutex mu;
    static constexpr const char* names[] = {"error", "warn", "info", "debug"};
    std::lock_guard lock(mu);
    std::cerr << "[" << names[static_cast<int>(l)] << "] " << message << '\n';
}

}  // namespace eikonal::log
