#pragma once

namespace sensopt {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sensopt
