#pragma once

namespace corrdyn {

inline constexpr const char* kToolName = "corrdyn";
inline constexpr const char* kVersion = "0.1.0";

}  // namespace corrdyn
