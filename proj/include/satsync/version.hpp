#pragma once

namespace satsync {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace satsync
