#pragma once

namespace zcsk {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace zcsk
