#include "iemo/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace iemo::log {

namespace {
std::atomic<Level> current{Level::warning};
std::mutex sink_mutex;

const char* label(Level level) {
    switch (level) {
        case Level::debug: return "debug";
        case Level::info: return "info";
        case Level::warning: return "warning";
        case Level::error: return "error";
        case Level::off: break;
    }
    return "";
}
}  // namespace

void set_level(Level level) { current.store(level); }
Level level() { return current.load(); }

void write(Level level, std::string_view message) {
    if (level < current.load() || level == Level::off) return;
    std::lock_guard lock(sink_mutex);
    std::clog << "[iemo " << label(level) << "] " << message << '\n';
}

}  // namespace iemo::log
