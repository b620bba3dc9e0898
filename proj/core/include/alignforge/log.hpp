#pragma once

#include <functional>
#include <string_view>

namespace alignforge::log {

using Sink = std::function<void(std::string_view)>;

// Replaces the process-wide log sink; empty restores stderr. Tests use this
// to capture output (e.g. to assert secrets never reach any sink).
void set_sink(Sink sink);

void info(std::string_view message);
void warn(std::string_view message);

}  // namespace alignforge::log
