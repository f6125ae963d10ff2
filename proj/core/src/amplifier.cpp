#include "geoamp/amplifier.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

#include "geoamp/errors.hpp"

namespace geoamp {

namespace {

const Rational kBox = 1000;

// Row r: a . (n, b, z) + c >= 0.
struct Row {
  std::array<Rational, 3> a;
  Rational c;
};

bool solve3(std::vector<std::array<Rational, 4>> m, std::size_t nv, std::array<Rational, 3>& x) {
  for (std::size_t col = 0; col < nv; ++col) {
    std::size_t piv = col;
    while (piv < nv && m[piv][col] == 0) ++piv;
    if (piv == nv) return false;
    std::swap(m[piv], m[col]);
    for (std::size_t r = 0; r < nv; ++r) {
      if (r == col || m[r][col] == 0) continue;
      const Rational f = m[r][col] / m[col][col];
      for (std::size_t k = col; k < 4; ++k) m[r][k] -= f * m[col][k];
    }
  }
  for (std::size_t r = 0; r < nv; ++r) x[r] = m[r][3] / m[r][r];
  return true;
}

}  // namespace

Rational max_term_exponent(const ExponentModel& model, const Rational& n, const Rational& b) {
  Rational best = model.terms.at(0).et + model.terms[0].eN * n + model.terms[0].eb * b;
  for (const auto& t : model.terms) best = std::max(best, Rational(t.et + t.eN * n + t.eb * b));
  return best;
}

OptimizationResult optimize_exponents(const ExponentModel& model) {
  if (model.terms.size() < 2) throw std::invalid_argument("optimize_exponents: need >= 2 terms");
  // Free variables in order (n, b), then z.
  const bool nfree = !model.fixed_N, bfree = !model.fixed_beta;
  std::vector<int> vars;
  if (nfree) vars.push_back(0);
  if (bfree) vars.push_back(1);
  vars.push_back(2);
  const std::size_t nv = vars.size();
  const Rational n0 = model.fixed_N.value_or(0), b0 = model.fixed_beta.value_or(0);

  std::vector<Row> rows;
  for (const auto& t : model.terms)  // z - et - eN n - eb b >= 0
    rows.push_back({{-t.eN, -t.eb, 1}, -t.et});
  for (const auto& c : model.constraints) rows.push_back({{c.cN, c.cb, 0}, c.c0});
  const std::size_t n_model_rows = rows.size();
  if (nfree) {
    rows.push_back({{1, 0, 0}, kBox});
    rows.push_back({{-1, 0, 0}, kBox});
  }
  if (bfree) {
    rows.push_back({{0, 1, 0}, kBox});
    rows.push_back({{0, -1, 0}, kBox});
  }
  // Substitute fixed values into the constants.
  for (auto& r : rows) {
    if (!nfree) r.c += r.a[0] * n0, r.a[0] = 0;
    if (!bfree) r.c += r.a[1] * b0, r.a[1] = 0;
  }

  std::optional<std::array<Rational, 3>> best;
  std::vector<std::size_t> best_rows;
  const std::size_t R = rows.size();
  std::vector<std::size_t> pick(nv);
  // Enumerate vertices: nv rows taken as equalities.
  auto visit = [&](const std::vector<std::size_t>& sel) {
    std::vector<std::array<Rational, 4>> m;
    for (std::size_t i : sel) {
      std::array<Rational, 4> row;
      for (std::size_t k = 0; k < nv; ++k) row[k] = rows[i].a[vars[k]];
      row[3] = -rows[i].c;
      m.push_back(row);
    }
    std::array<Rational, 3> xs{};
    if (!solve3(m, nv, xs)) return;
    std::array<Rational, 3> x{n0, b0, 0};
    for (std::size_t k = 0; k < nv; ++k) x[vars[k]] = xs[k];
    for (const auto& r : rows)
      if (r.a[0] * x[0] + r.a[1] * x[1] + r.a[2] * x[2] + r.c < 0) return;
    if (!best || x[2] < (*best)[2]) {
      best = x;
      best_rows = sel;
    }
  };
  std::vector<std::size_t> sel(nv);
  auto rec = [&](auto&& self, std::size_t start, std::size_t depth) -> void {
    if (depth == nv) return visit(sel);
    for (std::size_t i = start; i < R; ++i) {
      sel[depth] = i;
      self(self, i + 1, depth + 1);
    }
  };
  rec(rec, 0, 0);
  if (!best) throw UnboundedModel("optimize_exponents: no feasible vertex");
  for (std::size_t i : best_rows)
    if (i >= n_model_rows) throw UnboundedModel("optimize_exponents: optimum escapes to infinity");

  OptimizationResult res;
  res.N_exponent = (*best)[0];
  res.beta_exponent = (*best)[1];
  res.value = (*best)[2];
  res.bound_exponent = model.output_scale * res.value;
  for (std::size_t k = 0; k < model.terms.size(); ++k) {
    const auto& t = model.terms[k];
    if (t.et + t.eN * res.N_exponent + t.eb * res.beta_exponent == res.value) res.active.push_back(k);
  }
  return res;
}

ExponentModel preset_model(const std::string& name, const Rational& beta) {
  const Rational h(1, 2), q(1, 4);
  ExponentModel m;
  m.name = name;
  if (name == "period-a") {
    m.terms = {{0, -h, 0, "N^-1/2"}, {-h, 1, 0, "N t^-1/2"}};
    m.fixed_beta = 0;
  } else if (name == "period-b") {
    m.terms = {{0, -h, 0, "N^-1/2"}, {Rational(-1, 3), 1, 0, "N t^-1/3"}};
    m.fixed_beta = 0;
  } else if (name == "onspec") {
    m.terms = {{h, -h, 0, "t^1/2 N^-1/2"}, {q, 1, q, "N t^1/4 beta^1/4"}};
    m.fixed_beta = beta;
  } else if (name == "offspec") {
    m.terms = {{h, 0, -h, "t^1/2 beta^-1/2"}};
    m.fixed_beta = beta;
    m.fixed_N = 0;
  } else if (name == "main") {
    m.terms = {{h, -h, 0, "t^1/2 N^-1/2"}, {q, 1, q, "N t^1/4 beta^1/4"}, {h, 0, -h, "t^1/2 beta^-1/2"}};
    m.constraints = {{0, 0, 1, "beta >= 1"}, {Rational(2, 3), 0, -1, "beta <= t^2/3"}};
  } else {
    throw ConfigInvalid("unknown exponent preset '" + name + "'");
  }
  return m;
}

namespace {

void check_theta(const Rational& theta) {
  if (theta < 0 || theta >= Rational(1, 2))
    throw std::invalid_argument("Ramanujan parameter must lie in [0, 1/2)");
}

}  // namespace

ExponentModel conditional_onspec_model(const Rational& theta, const Rational& beta) {
  check_theta(theta);
  const Rational h(1, 2);
  ExponentModel m;
  m.name = "conditional-onspec";
  m.theta = theta;
  m.terms = {{h, -1, 0, "t^1/2 N^-1"}, {-h, 1 + 2 * theta, 1, "N^(1+2theta) t^-1/2 beta"}};
  // The spectral count over m ~ N^2 needs N^2 >= delta^-2 with delta = t^-1/2 beta^1/2.
  m.constraints = {{-h, 1, h, "N >= t^1/2 beta^-1/2"}};
  m.fixed_beta = beta;
  return m;
}

ExponentModel conditional_main_model(const Rational& theta) {
  check_theta(theta);
  const Rational h(1, 2);
  ExponentModel m;
  m.name = "conditional";
  m.theta = theta;
  m.terms = {{h, -1, 0, "t^1/2 N^-1"},
             {-h, 1 + 2 * theta, 1, "N^(1+2theta) t^-1/2 beta"},
             {h, 0, -h, "t^1/2 beta^-1/2"}};
  m.constraints = {{-h, 1, h, "N >= t^1/2 beta^-1/2"},
                   {0, 0, 1, "beta >= 1"},
                   {Rational(2, 3), 0, -1, "beta <= t^2/3"}};
  return m;
}

AffineExponent affine_in_beta(const std::string& preset, const Rational& b1, const Rational& b2) {
  auto at = [&](const Rational& b) {
    const ExponentModel m = preset_model(preset, b);
    if (m.terms.size() > 1) return optimize_exponents(m);
    OptimizationResult r;
    r.beta_exponent = b;
    r.value = max_term_exponent(m, m.fixed_N.value_or(0), b);
    r.bound_exponent = m.output_scale * r.value;
    r.active = {0};
    return r;
  };
  const auto r1 = at(b1), r2 = at(b2);
  if (r1.active != r2.active)
    throw FitDegenerate("affine_in_beta: active set changes between the sample points");
  AffineExponent out;
  out.c1 = (r2.bound_exponent - r1.bound_exponent) / (b2 - b1);
  out.c0 = r1.bound_exponent - out.c1 * b1;
  return out;
}

ConditionalExponents conditional_exponents(const Rational& theta) {
  check_theta(theta);
  ConditionalExponents out;
  const auto main = optimize_exponents(conditional_main_model(theta));
  out.l2_exponent = main.bound_exponent;
  out.beta_exponent = main.beta_exponent;
  // Period exponents: affine dependence of the on-spectrum bound on log_t beta.
  const Rational b1(1, 10), b2(1, 5);
  const auto r1 = optimize_exponents(conditional_onspec_model(theta, b1));
  const auto r2 = optimize_exponents(conditional_onspec_model(theta, b2));
  out.period_beta = (r2.bound_exponent - r1.bound_exponent) / (b2 - b1);
  out.period_t = r1.bound_exponent - out.period_beta * b1;
  return out;
}

}  // namespace geoamp
