#pragma once

// Minimal stderr logging. Library code only emits warnings; the CLI adds
// per-phase timing lines through info().

#include <string>

namespace lsr::log {

// Suppresses info() when true; warnings always print.
bool& quiet();

void info(const std::string& msg);
void warn(const std::string& msg);

}  // namespace lsr::log
