#pragma once

namespace ggk {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kToolName = "ggk";

// Counter-based generator used by the walk module; recorded in run manifests.
inline constexpr const char* kRngAlgorithm = "splitmix64-counter-v1";

} // namespace ggk
