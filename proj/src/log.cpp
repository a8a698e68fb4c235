#include "smnp/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace smnp::log {
namespace {
std::atomic<Level> g_level{Level::Notice};
std::mutex g_mutex;
}  // namespace

void set_level(Level level) { g_level.store(level); }
Level level() { return g_level.load(); }

void notice(std::string_view message) {
  if (g_level.load() < Level::Notice) return;
  std::lock_guard lock(g_mutex);
  std::clog << "smnp: " << message << '\n';
}

void warning(std::string_view message) {
  if (g_level.load() < Level::Warning) return;
  std::lock_guard lock(g_mutex);
  std::clog << "smnp warning: " << message << '\n';
}

}  // namespace smnp::log
