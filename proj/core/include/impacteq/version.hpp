#pragma once

namespace impacteq {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace impacteq
