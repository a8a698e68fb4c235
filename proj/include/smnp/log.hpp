#pragma once

#include <string_view>

namespace smnp::log {

enum class Level { Quiet = 0, Warning = 1, Notice = 2 };

/// Process-wide verbosity; defaults to Notice. Messages go to stderr.
void set_level(Level level);
Level level();

void notice(std::string_view message);
void warning(std::string_view message);

}  // namespace smnp::log
