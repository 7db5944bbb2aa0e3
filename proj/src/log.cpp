#include "log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace fpaug::log {

namespace {
std::atomic<Level> g_level{Level::Warn};
std::mutex g_mutex;

const char* tag(Level l) {
  switch (l) {
    case Level::Error: return "error";
    case Level::Warn: return "warning";
    case Level::Info: return "info";
    case Level::Debug: return "debug";
  }
  return "";
}
}  // namespace

void set_level(Level level) noexcept { g_level.store(level); }
Level level() noexcept { return g_level.load(); }

void write(Level l, std::string_view message) {
  if (static_cast<int>(l) > static_cast<int>(g_level.load())) return;
  std::lock_guard<std::mutex> lock(g_mutex);
  std::cerr << "fpaug " << tag(l) << ": " << message << '\n';
}

}  // namespace fpaug::log
