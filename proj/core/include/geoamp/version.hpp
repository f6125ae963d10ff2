#pragma once

namespace geoamp {
inline constexpr const char* kVersion = "0.1.0";
}
