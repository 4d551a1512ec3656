#pragma once

namespace lrg {

inline constexpr const char* kVersion = "0.1.0";

} // namespace lrg
