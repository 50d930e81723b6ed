#pragma once

namespace nonloc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace nonloc
