#pragma once

namespace basisn {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace basisn
