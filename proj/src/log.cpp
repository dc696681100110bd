#include "sentrybus/log.hpp"

#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace sentrybus::log {

Level level() {
  static Level lvl = [] {
    const char* env = std::getenv("SENTRYBUS_LOG");
    if (env == nullptr) return Level::Error;
    if (std::strcmp(env, "debug") == 0) return Level::Debug;
    if (std::strcmp(env, "info") == 0) return Level::Info;
    return Level::Error;
  }();
  return lvl;
}

void write(Level lvl, const char* fmt, ...) {
  if (lvl > level()) return;
  const char* tag = lvl == Level::Error ? "error" : (lvl == Level::Info ? "info" : "debug");
  std::fprintf(stderr, "[sentrybus %s] ", tag);
  va_list args;
  va_start(args, fmt);
  std::vfprintf(stderr, fmt, args);
  va_end(args);
  std::fputc('\n', stderr);
}

}  // namespace sentrybus::log
