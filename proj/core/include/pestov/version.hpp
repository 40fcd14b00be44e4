#pragma once

namespace pestov {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace pestov
