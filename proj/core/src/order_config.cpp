#include "geoamp/order_config.hpp"

#include <fstream>
#include <sstream>
#include <toml.hpp>

#include "geoamp/errors.hpp"

namespace geoamp {

namespace {

std::string rational_text(const toml::node& n) {
  if (auto s = n.value<std::string>()) return *s;
  if (auto i = n.value<std::int64_t>()) return std::to_string(*i);
  throw ConfigInvalid("order basis entries must be strings \"p/q\" or integers");
}

}  // namespace

OrderBasis parse_order_config(std::string_view toml_text) {
  toml::table tbl;
  try {
    tbl = toml::parse(toml_text);
  } catch (const toml::parse_error& e) {
    throw ConfigInvalid(std::string("order config: ") + std::string(e.description()));
  }
  const auto a = tbl["algebra"]["a"].value<std::int64_t>();
  const auto b = tbl["algebra"]["b"].value<std::int64_t>();
  if (!a || !b) throw ConfigInvalid("order config: [algebra] needs integers a and b");
  const AlgebraSpec alg(*a, *b);
  const auto* rows = tbl["order"]["basis"].as_array();
  const auto q = tbl["order"]["q"].value<std::int64_t>();
  if (!rows || rows->size() != 4) throw ConfigInvalid("order config: basis needs 4 rows");
  if (!q) throw ConfigInvalid("order config: [order] needs integer q");
  std::vector<QuatElement> basis;
  for (const auto& row : *rows) {
    const auto* r = row.as_array();
    if (!r || r->size() != 4) throw ConfigInvalid("order config: basis rows need 4 entries");
    std::array<Rational, 4> x;
    for (std::size_t i = 0; i < 4; ++i) x[i] = parse_rational(rational_text((*r)[i]));
    basis.emplace_back(alg, x);
  }
  return OrderBasis(alg, {basis[0], basis[1], basis[2], basis[3]}, *q);
}

OrderBasis load_order_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigInvalid("cannot open order config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_order_config(ss.str());
}

}  // namespace geoamp
