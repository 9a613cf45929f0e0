#pragma once

namespace driftmc {

inline constexpr const char* kVersion = "driftmc 0.1.0";

}  // namespace driftmc
