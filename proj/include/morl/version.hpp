#pragma once

namespace morl {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace morl
