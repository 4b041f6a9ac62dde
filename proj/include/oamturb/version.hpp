#pragma once

namespace oamturb {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace oamturb
