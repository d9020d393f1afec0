#pragma once

namespace hetspec {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace hetspec
