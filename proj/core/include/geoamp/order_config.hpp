#pragma once

#include <filesystem>
#include <string_view>

#include "geoamp/quaternion.hpp"

namespace geoamp {

// [algebra] a, b and [order] basis (4 rows of 4 "p/q" strings), q.
// Validation failures raise ConfigInvalid.
OrderBasis parse_order_config(std::string_view toml_text);
OrderBasis load_order_config(const std::filesystem::path& path);

}  // namespace geoamp
