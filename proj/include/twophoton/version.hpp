#pragma once

namespace twophoton {
inline constexpr const char* version = "0.1.0";
}
