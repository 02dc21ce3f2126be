#pragma once

namespace pwspd {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace pwspd
