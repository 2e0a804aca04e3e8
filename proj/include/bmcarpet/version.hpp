#pragma once

namespace bmcarpet {

inline constexpr const char* kVersion = "0.1.0";
// Bumped whenever a JSON payload changes shape; see docs/schema.md.
inline constexpr int kSchemaVersion = 1;

}  // namespace bmcarpet
