#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>
#include <toml.hpp>

#include "geoamp/group.hpp"
#include "geoamp/quaternion.hpp"

namespace geoamp::lab {

// Parses TOML text; syntax errors become ConfigInvalid.
toml::table parse_config(std::string_view text, std::string_view source);

const toml::table& require_table(const toml::table& t, std::string_view key);
double get_double(const toml::table& t, std::string_view key, std::optional<double> fallback = {});
std::int64_t get_int(const toml::table& t, std::string_view key,
                     std::optional<std::int64_t> fallback = {});
std::string get_string(const toml::table& t, std::string_view key,
                       std::optional<std::string> fallback = {});
bool get_bool(const toml::table& t, std::string_view key, bool fallback);
// A list of numbers; throws ConfigInvalid when absent (unless allow_missing) or empty.
std::vector<double> get_doubles(const toml::table& t, std::string_view key, bool allow_missing = false);
// Rational from "p/q" text or an integer.
Rational get_rational(const toml::table& t, std::string_view key, std::optional<Rational> fallback = {});

// Group element from one of
//   g = [a, b, c, d]                      (det 1)
//   group = [["a", y], ["k", theta], ...]  (product left to right)
//   [geometry] kind = "ultraparallel" (n, y1, y2) | "centred-ultraparallel" (n, rho) | "d2" (rho, y, sign)
Mat2 parse_group(const toml::table& section);

// s grid from `s = [...]` or geometric `s_min`, `s_max`, `count`.
std::vector<double> parse_s_grid(const toml::table& section);

// n values: `n = [...]`, or every n <= n_dense plus `n_log_points` geometric points up to n_max.
std::vector<std::int64_t> parse_n_grid(const toml::table& section);

}  // namespace geoamp::lab
