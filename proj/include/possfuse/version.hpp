#pragma once

namespace possfuse {
inline constexpr const char* kVersion = "0.1.0";
}
