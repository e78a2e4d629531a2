#pragma once

namespace homext {
inline constexpr const char* kVersion = "0.1.0";
}
