#pragma once

namespace cavpass {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cavpass
