#pragma once

namespace dirac_hardy {

inline constexpr const char* version = "0.1.0";

} // namespace dirac_hardy
