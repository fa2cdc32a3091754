#pragma once

namespace pfl {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace pfl
