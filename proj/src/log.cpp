#include "chefs/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace chefs::log {

namespace {
std::atomic<Level> g_level{Level::Info};
std::mutex g_mutex;

const char* name(Level l) {
    switch (l) {
        case Level::Debug: return "debug";
        case Level::Info: return "info";
        case Level::Warn: return "warn";
        case Level::Error: return "error";
        case Level::Off: return "off";
    }
    return "info";
}
}  // namespace

void set_level(Level level) { g_level = level; }
Level level() { return g_level; }

void emit(Level lvl, std::string_view event, const nlohmann::json& fields) {
    if (lvl < g_level.load() || g_level.load() == Level::Off) return;
    nlohmann::json line = nlohmann::json::object();
    line["level"] = name(lvl);
    line["event"] = std::string(event);
    if (fields.is_object())
        for (auto it = fields.begin(); it != fields.end(); ++it) line[it.key()] = it.value();
    const std::lock_guard lock(g_mutex);
    std::cerr << line.dump() << '\n';
}

}  // namespace chefs::log
