#pragma once

namespace isar {
inline constexpr const char* kVersion = "0.1.0";
}
