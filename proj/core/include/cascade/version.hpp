#pragma once

#include <string_view>

namespace cascade {

inline constexpr std::string_view kVersion = "0.4.0";

// Recorded in every output sidecar so results can be tied to the exact
// generator. Changing the generator or the seed-splitting scheme is a
// breaking change and must bump this string.
inline constexpr std::string_view kRngIdentity = "xoshiro256** / splitmix64-derived seeds";

}  // namespace cascade
