#pragma once

namespace perdec {

inline constexpr const char* kToolVersion = "perdec 0.1.0";
inline constexpr int kSchemaVersion = 1;

}  // namespace perdec
