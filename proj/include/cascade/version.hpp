#pragma once

namespace cascade {

inline constexpr const char* kToolName = "cascade-lab";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace cascade
