#pragma once

namespace typlab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace typlab
