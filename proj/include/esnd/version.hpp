#pragma once

namespace esnd {

inline constexpr const char* kVersion = "0.1.0";

} // namespace esnd
