#pragma once

namespace braggsim {

inline constexpr const char* version = "1.0.0";

}  // namespace braggsim
