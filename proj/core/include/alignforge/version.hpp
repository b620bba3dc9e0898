#pragma once

namespace alignforge {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace alignforge
