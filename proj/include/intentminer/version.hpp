#pragma once

#include <string_view>

namespace intentminer {

inline constexpr std::string_view kVersion = "0.1.0";

// Bumped when an on-disk format changes incompatibly.
inline constexpr int kModelFormatVersion = 1;
inline constexpr int kReportFormatVersion = 1;
inline constexpr int kManifestFormatVersion = 1;

}  // namespace intentminer
