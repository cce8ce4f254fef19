#pragma once

namespace sgdtheta {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kConfigFormatVersion = 1;

}  // namespace sgdtheta
