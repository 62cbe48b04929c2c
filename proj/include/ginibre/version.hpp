#pragma once

namespace ginibre {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ginibre
