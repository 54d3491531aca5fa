#pragma once

namespace lkr {
inline constexpr const char* kVersion = "0.1.0";
}
