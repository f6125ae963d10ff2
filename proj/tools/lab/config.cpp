#include "lab/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "geoamp/errors.hpp"
#include "geoamp/oscillatory.hpp"

namespace geoamp::lab {

namespace {

std::string key_text(std::string_view key) { return "'" + std::string(key) + "'"; }

double number(const toml::node& n, std::string_view what) {
  if (auto v = n.value<double>()) return *v;
  throw ConfigInvalid(std::string(what) + " must be a number");
}

}  // namespace

toml::table parse_config(std::string_view text, std::string_view source) {
  try {
    return toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    throw ConfigInvalid(std::string(source) + ": " + std::string(e.description()));
  }
}

const toml::table& require_table(const toml::table& t, std::string_view key) {
  const auto* sub = t[key].as_table();
  if (!sub) throw ConfigInvalid("missing table [" + std::string(key) + "]");
  return *sub;
}

double get_double(const toml::table& t, std::string_view key, std::optional<double> fallback) {
  const auto* n = t.get(key);
  if (!n) {
    if (fallback) return *fallback;
    throw ConfigInvalid("missing number " + key_text(key));
  }
  return number(*n, key_text(key));
}

std::int64_t get_int(const toml::table& t, std::string_view key,
                     std::optional<std::int64_t> fallback) {
  const auto* n = t.get(key);
  if (!n) {
    if (fallback) return *fallback;
    throw ConfigInvalid("missing integer " + key_text(key));
  }
  if (auto v = n->value_exact<std::int64_t>()) return *v;
  throw ConfigInvalid(key_text(key) + " must be an integer");
}

std::string get_string(const toml::table& t, std::string_view key,
                       std::optional<std::string> fallback) {
  const auto* n = t.get(key);
  if (!n) {
    if (fallback) return *fallback;
    throw ConfigInvalid("missing string " + key_text(key));
  }
  if (auto v = n->value<std::string>()) return *v;
  throw ConfigInvalid(key_text(key) + " must be a string");
}

bool get_bool(const toml::table& t, std::string_view key, bool fallback) {
  const auto* n = t.get(key);
  if (!n) return fallback;
  if (auto v = n->value<bool>()) return *v;
  throw ConfigInvalid(key_text(key) + " must be a boolean");
}

std::vector<double> get_doubles(const toml::table& t, std::string_view key, bool allow_missing) {
  const auto* n = t.get(key);
  if (!n) {
    if (allow_missing) return {};
    throw ConfigInvalid("missing list " + key_text(key));
  }
  std::vector<double> out;
  if (const auto* arr = n->as_array()) {
    for (const auto& e : *arr) out.push_back(number(e, key_text(key) + " entries"));
  } else {
    out.push_back(number(*n, key_text(key)));
  }
  if (out.empty()) throw ConfigInvalid(key_text(key) + " must not be empty");
  return out;
}

Rational get_rational(const toml::table& t, std::string_view key, std::optional<Rational> fallback) {
  const auto* n = t.get(key);
  if (!n) {
    if (fallback) return *fallback;
    throw ConfigInvalid("missing rational " + key_text(key));
  }
  if (auto i = n->value_exact<std::int64_t>()) return Rational(*i);
  if (auto s = n->value<std::string>()) {
    try {
      return parse_rational(*s);
    } catch (const std::exception&) {
      throw ConfigInvalid(key_text(key) + " is not a rational \"p/q\"");
    }
  }
  throw ConfigInvalid(key_text(key) + " must be an integer or a \"p/q\" string");
}

Mat2 parse_group(const toml::table& section) {
  if (const auto* g = section.get("g")) {
    const auto* arr = g->as_array();
    if (!arr || arr->size() != 4) throw ConfigInvalid("'g' must list 4 reals");
    const Mat2 m{number((*arr)[0], "g"), number((*arr)[1], "g"), number((*arr)[2], "g"),
                 number((*arr)[3], "g")};
    if (std::abs(m.det() - 1.0) > 1e-9) throw ConfigInvalid("'g' must have determinant 1");
    return m;
  }
  if (const auto* g = section.get("group")) {
    const auto* arr = g->as_array();
    if (!arr) throw ConfigInvalid("'group' must be a list of [\"a\"|\"k\"|\"n\", value] factors");
    Mat2 m;
    for (const auto& f : *arr) {
      const auto* pair = f.as_array();
      if (!pair || pair->size() != 2) throw ConfigInvalid("group factors are [name, value] pairs");
      const auto name = (*pair)[0].value<std::string>();
      const double v = number((*pair)[1], "group factor value");
      if (name == "a") m = m * mat_a(v);
      else if (name == "k") m = m * mat_k(v);
      else if (name == "n") m = m * mat_n(v);
      else throw ConfigInvalid("group factor names are a, k or n");
    }
    return m;
  }
  if (const auto* geo = section["geometry"].as_table()) {
    const std::string kind = get_string(*geo, "kind");
    try {
      if (kind == "ultraparallel")
        return ultraparallel_pair(get_double(*geo, "n"), get_double(*geo, "y1"), get_double(*geo, "y2"));
      if (kind == "centred-ultraparallel")
        return centred_ultraparallel(get_double(*geo, "n"), get_double(*geo, "rho"));
      if (kind == "d2")
        return d2_configuration(get_double(*geo, "rho"), get_double(*geo, "y", 0.0),
                                static_cast<int>(get_int(*geo, "sign", 1)));
    } catch (const std::invalid_argument& e) {
      throw ConfigInvalid(std::string("geometry: ") + e.what());
    }
    throw ConfigInvalid("geometry kind must be ultraparallel, centred-ultraparallel or d2");
  }
  throw ConfigInvalid("group element needs 'g', 'group' or [geometry]");
}

std::vector<double> parse_s_grid(const toml::table& section) {
  std::vector<double> s = get_doubles(section, "s", true);
  if (s.empty()) {
    const double lo = get_double(section, "s_min"), hi = get_double(section, "s_max");
    const auto count = get_int(section, "count");
    if (!(lo > 0) || !(hi > lo) || count < 2) throw ConfigInvalid("s grid needs 0 < s_min < s_max, count >= 2");
    for (std::int64_t i = 0; i < count; ++i)
      s.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(count - 1)));
  }
  for (double v : s)
    if (!(v > 0)) throw ConfigInvalid("s values must be positive");
  return s;
}

std::vector<std::int64_t> parse_n_grid(const toml::table& section) {
  std::set<std::int64_t> out;
  if (const auto* n = section.get("n")) {
    const auto* arr = n->as_array();
    if (!arr || arr->empty()) throw ConfigInvalid("'n' must be a non-empty list of integers");
    for (const auto& e : *arr) {
      auto v = e.value_exact<std::int64_t>();
      if (!v || *v < 1) throw ConfigInvalid("'n' entries must be positive integers");
      out.insert(*v);
    }
  } else {
    const auto n_max = get_int(section, "n_max");
    const auto dense = std::min(get_int(section, "n_dense", 64), n_max);
    const auto points = get_int(section, "n_log_points", 24);
    if (n_max < 1 || dense < 1 || points < 0) throw ConfigInvalid("n grid needs n_max >= 1");
    for (std::int64_t n = 1; n <= dense; ++n) out.insert(n);
    for (std::int64_t i = 1; i <= points; ++i) {
      const double v = dense * std::pow(static_cast<double>(n_max) / dense,
                                        static_cast<double>(i) / static_cast<double>(points));
      out.insert(std::min<std::int64_t>(n_max, std::llround(v)));
    }
  }
  return {out.begin(), out.end()};
}

}  // namespace geoamp::lab
