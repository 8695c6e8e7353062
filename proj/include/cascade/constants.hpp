#pragma once

#include <string_view>

namespace cascade {

// Energies are in ueV, times in ps, rates in 1/ps throughout.
inline constexpr double kHbar = 658.2119569;  // ueV * ps

inline constexpr std::string_view kVersion = "0.1.0";

}  // namespace cascade
