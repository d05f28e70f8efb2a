#pragma once

#include <string_view>

namespace iemo::log {

enum class Level { debug, info, warning, error, off };

void set_level(Level level);
Level level();

void write(Level level, std::string_view message);

inline void info(std::string_view message) { write(Level::info, message); }
inline void warning(std::string_view message) { write(Level::warning, message); }
inline void error(std::string_view message) { write(Level::error, message); }

}  // namespace iemo::log
