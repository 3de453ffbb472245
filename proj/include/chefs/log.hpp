#pragma once

#include <string_view>

#include <json.hpp>

namespace chefs::log {

enum class Level { Debug, Info, Warn, Error, Off };

void set_level(Level level);
Level level();

/// Emits one JSON object per line on standard error:
/// {"level":"info","event":"...", ...fields}
void emit(Level level, std::string_view event, const nlohmann::json& fields = nlohmann::json::object());

inline void info(std::string_view event, const nlohmann::json& fields = nlohmann::json::object()) { emit(Level::Info, event, fields); }
inline void warn(std::string_view event, const nlohmann::json& fields = nlohmann::json::object()) { emit(Level::Warn, event, fields); }
inline void error(std::string_view event, const nlohmann::json& fields = nlohmann::json::object()) { emit(Level::Error, event, fields); }
inline void debug(std::string_view event, const nlohmann::json& fields = nlohmann::json::object()) { emit(Level::Debug, event, fields); }

}  // namespace chefs::log
