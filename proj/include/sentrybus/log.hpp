#ifndef SENTRYBUS_LOG_HPP
#define SENTRYBUS_LOG_HPP

namespace sentrybus::log {

enum class Level { Error = 0, Info = 1, Debug = 2 };

// Level comes from SENTRYBUS_LOG ({error|info|debug}), read once.
Level level();

void write(Level lvl, const char* fmt, ...) __attribute__((format(printf, 2, 3)));

}  // namespace sentrybus::log

#define SB_LOG_ERROR(...) ::sentrybus::log::write(::sentrybus::log::Level::Error, __VA_ARGS__)
#define SB_LOG_INFO(...) ::sentrybus::log::write(::sentrybus::log::Level::Info, __VA_ARGS__)
#define SB_LOG_DEBUG(...) ::sentrybus::log::write(::sentrybus::log::Level::Debug, __VA_ARGS__)

#endif
