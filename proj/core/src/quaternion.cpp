#include "geoamp/quaternion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "geoamp/errors.hpp"

namespace geoamp {

namespace {

using boost::multiprecision::cpp_int;
using i128 = __int128;

std::int64_t mod_pow(std::int64_t base, std::int64_t e, std::int64_t mod) {
  i128 r = 1, b = ((base % mod) + mod) % mod;
  while (e > 0) {
    if (e & 1) r = r * b % mod;
    b = b * b % mod;
    e >>= 1;
  }
  return static_cast<std::int64_t>(r);
}

// Legendre symbol (u/p) for odd prime p not dividing u.
int legendre(std::int64_t u, std::int64_t p) {
  return mod_pow(u, (p - 1) / 2, p) == 1 ? 1 : -1;
}

std::int64_t to_i64(const Rational& r, const char* what) {
  if (boost::multiprecision::denominator(r) != 1) throw ConfigInvalid(what);
  return static_cast<std::int64_t>(boost::multiprecision::numerator(r));
}

using RMat = std::array<std::array<Rational, 4>, 4>;

bool invert(RMat m, RMat& inv) {
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) inv[i][j] = (i == j) ? 1 : 0;
  for (int col = 0; col < 4; ++col) {
    int piv = -1;
    for (int r = col; r < 4; ++r)
      if (m[r][col] != 0) {
        piv = r;
        break;
      }
    if (piv < 0) return false;
    std::swap(m[col], m[piv]);
    std::swap(inv[col], inv[piv]);
    const Rational s = m[col][col];
    for (int j = 0; j < 4; ++j) {
      m[col][j] /= s;
      inv[col][j] /= s;
    }
    for (int r = 0; r < 4; ++r) {
      if (r == col || m[r][col] == 0) continue;
      const Rational f = m[r][col];
      for (int j = 0; j < 4; ++j) {
        m[r][j] -= f * m[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return true;
}

Rational det4(RMat m) {
  Rational det = 1;
  for (int col = 0; col < 4; ++col) {
    int piv = -1;
    for (int r = col; r < 4; ++r)
      if (m[r][col] != 0) {
        piv = r;
        break;
      }
    if (piv < 0) return 0;
    if (piv != col) {
      std::swap(m[col], m[piv]);
      det = -det;
    }
    det *= m[col][col];
    for (int r = col + 1; r < 4; ++r) {
      const Rational f = m[r][col] / m[col][col];
      for (int j = col; j < 4; ++j) m[r][j] -= f * m[col][j];
    }
  }
  return det;
}

std::int64_t isqrt_exact(i128 v) {
  if (v < 0) return -1;
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<long double>(v)));
  while (static_cast<i128>(r) * r > v) --r;
  while (static_cast<i128>(r + 1) * (r + 1) <= v) ++r;
  return static_cast<i128>(r) * r == v ? r : -1;
}

}  // namespace

Rational parse_rational(const std::string& s) {
  const auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(cpp_int(s));
    const cpp_int num(s.substr(0, slash));
    const cpp_int den(s.substr(slash + 1));
    if (den == 0) throw ConfigInvalid("zero denominator in rational '" + s + "'");
    return Rational(num, den);
  } catch (const std::runtime_error&) {
    throw ConfigInvalid("malformed rational '" + s + "'");
  }
}

std::string to_string(const Rational& r) { return r.str(); }

bool is_squarefree(std::int64_t n) {
  n = std::llabs(n);
  if (n == 0) return false;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    if (n % (p * p) == 0) return false;
    if (n % p == 0) n /= p;
  }
  return true;
}

std::vector<std::int64_t> prime_factors(std::int64_t n) {
  std::vector<std::int64_t> out;
  n = std::llabs(n);
  for (std::int64_t p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    out.push_back(p);
    while (n % p == 0) n /= p;
  }
  if (n > 1) out.push_back(n);
  return out;
}

std::int64_t sigma1(std::int64_t m) {
  if (m < 1) throw std::invalid_argument("sigma1 needs m >= 1");
  std::int64_t s = 0;
  for (std::int64_t d = 1; d * d <= m; ++d) {
    if (m % d) continue;
    s += d;
    if (d * d != m) s += m / d;
  }
  return s;
}

int hilbert_symbol(std::int64_t a, std::int64_t b, std::int64_t p) {
  if (a == 0 || b == 0) throw std::invalid_argument("hilbert_symbol of zero");
  if (p == -1) return (a < 0 && b < 0) ? -1 : 1;
  int alpha = 0, beta = 0;
  while (a % p == 0) {
    a /= p;
    ++alpha;
  }
  while (b % p == 0) {
    b /= p;
    ++beta;
  }
  if (p == 2) {
    auto eps = [](std::int64_t u) { return (((u % 8) + 8) % 8 % 4 == 3) ? 1 : 0; };
    auto omega = [](std::int64_t u) {
      const auto r = ((u % 8) + 8) % 8;
      return (r == 3 || r == 5) ? 1 : 0;
    };
    const int e = eps(a) * eps(b) + alpha * omega(b) + beta * omega(a);
    return (e % 2) ? -1 : 1;
  }
  int s = ((alpha * beta) % 2 == 1 && ((p - 1) / 2) % 2 == 1) ? -1 : 1;
  if (beta % 2) s *= legendre(a, p);
  if (alpha % 2) s *= legendre(b, p);
  return s;
}

AlgebraSpec::AlgebraSpec(std::int64_t a, std::int64_t b) : a_(a), b_(b) {
  if (a <= 0) throw ConfigInvalid("algebra parameter a must be positive");
  if (!is_squarefree(a) || !is_squarefree(b)) throw ConfigInvalid("a and b must be squarefree");
  if (ramified_places().empty()) throw ConfigInvalid("(a,b) splits: not a division algebra");
}

std::vector<std::int64_t> AlgebraSpec::ramified_places() const {
  std::vector<std::int64_t> places;
  if (hilbert_symbol(a_, b_, -1) == -1) places.push_back(-1);
  auto primes = prime_factors(2 * a_ * b_);
  for (auto p : primes)
    if (hilbert_symbol(a_, b_, p) == -1) places.push_back(p);
  return places;
}

std::int64_t AlgebraSpec::discriminant() const {
  std::int64_t d = 1;
  for (auto p : ramified_places())
    if (p > 0) d *= p;
  return d;
}

QuatElement QuatElement::conj() const { return QuatElement(alg_, {x_[0], -x_[1], -x_[2], -x_[3]}); }

Rational QuatElement::norm() const {
  const Rational a(alg_.a()), b(alg_.b());
  return x_[0] * x_[0] - a * x_[1] * x_[1] - b * x_[2] * x_[2] + a * b * x_[3] * x_[3];
}

Rational QuatElement::trace() const { return 2 * x_[0]; }

bool QuatElement::is_zero() const {
  return std::all_of(x_.begin(), x_.end(), [](const Rational& r) { return r == 0; });
}

QuatElement operator*(const QuatElement& x, const QuatElement& y) {
  if (!(x.alg_ == y.alg_)) throw std::invalid_argument("operands over different algebras");
  const Rational a(x.alg_.a()), b(x.alg_.b());
  // x = xi1 + eta1 W, y = xi2 + eta2 W with xi, eta in Q(w), W xi = conj(xi) W.
  auto fmul = [&](const Rational& u0, const Rational& u1, const Rational& v0, const Rational& v1) {
    return std::array<Rational, 2>{u0 * v0 + a * u1 * v1, u0 * v1 + u1 * v0};
  };
  const auto p1 = fmul(x[0], x[1], y[0], y[1]);
  const auto p2 = fmul(x[2], x[3], y[2], -y[3]);
  const auto p3 = fmul(x[0], x[1], y[2], y[3]);
  const auto p4 = fmul(x[2], x[3], y[0], -y[1]);
  return QuatElement(x.alg_, {p1[0] + b * p2[0], p1[1] + b * p2[1], p3[0] + p4[0], p3[1] + p4[1]});
}

QuatElement operator+(const QuatElement& x, const QuatElement& y) {
  if (!(x.alg_ == y.alg_)) throw std::invalid_argument("operands over different algebras");
  return QuatElement(x.alg_, {x[0] + y[0], x[1] + y[1], x[2] + y[2], x[3] + y[3]});
}

QuatElement operator-(const QuatElement& x, const QuatElement& y) {
  return x + Rational(-1) * y;
}

QuatElement operator*(const Rational& s, const QuatElement& x) {
  return QuatElement(x.alg_, {s * x[0], s * x[1], s * x[2], s * x[3]});
}

QuatElement quat_arith(const QuatElement& x, const QuatElement& y, QuatOp op) {
  switch (op) {
    case QuatOp::mul:
      return x * y;
    case QuatOp::conj:
      return x.conj();
    case QuatOp::norm:
      return QuatElement::scalar(x.algebra(), x.norm());
    case QuatOp::trace:
      return QuatElement::scalar(x.algebra(), x.trace());
  }
  throw std::invalid_argument("unknown quaternion op");
}

Mat2 embed_matrix(const AlgebraSpec& alg, const std::array<double, 4>& x) {
  const double r = std::sqrt(static_cast<double>(alg.a()));
  const double xi = x[0] + x[1] * r, xib = x[0] - x[1] * r;
  const double eta = x[2] + x[3] * r, etab = x[2] - x[3] * r;
  return {xib, etab, static_cast<double>(alg.b()) * eta, xi};
}

Mat2 embed_matrix(const QuatElement& x) {
  return embed_matrix(x.algebra(), {x[0].convert_to<double>(), x[1].convert_to<double>(),
                                    x[2].convert_to<double>(), x[3].convert_to<double>()});
}

OrderBasis::OrderBasis(const AlgebraSpec& alg, std::array<QuatElement, 4> basis, std::int64_t q)
    : alg_(alg), basis_(std::move(basis)), q_(q) {
  if (q < 1) throw ConfigInvalid("level q must be positive");
  RMat B;
  cpp_int den = 1;
  for (int j = 0; j < 4; ++j) {
    if (!(basis_[j].algebra() == alg_)) throw ConfigInvalid("basis element over another algebra");
    for (int i = 0; i < 4; ++i) {
      B[i][j] = basis_[j][i];
      den = boost::multiprecision::lcm(den, boost::multiprecision::denominator(B[i][j]));
    }
  }
  den_ = static_cast<std::int64_t>(den);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) bscaled_[i][j] = to_i64(B[i][j] * den_, "basis scaling");
  RMat inv;
  if (!invert(B, inv)) throw ConfigInvalid("order basis is linearly dependent");
  cpp_int ideno = 1;
  for (auto& row : inv)
    for (auto& v : row) {
      v /= den_;
      ideno = boost::multiprecision::lcm(ideno, boost::multiprecision::denominator(v));
    }
  inv_den_ = static_cast<std::int64_t>(ideno);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) inv_num_[i][j] = to_i64(inv[i][j] * inv_den_, "inverse scaling");

  if (!contains(QuatElement::scalar(alg_, 1))) throw ConfigInvalid("1 is not in the order");
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const auto prod = basis_[i] * basis_[j];
      if (!contains(prod)) throw ConfigInvalid("order basis is not closed under multiplication");
      const auto c = coords(prod);
      for (int k = 0; k < 4; ++k) mult_[i][j][k] = c[k];
      gram_[i][j] = to_i64((basis_[i] * basis_[j].conj()).trace(), "trace form not integral");
    }
    const auto cc = coords(basis_[i].conj());
    for (int k = 0; k < 4; ++k) conj_[k][i] = cc[k];
    trace_[i] = to_i64(basis_[i].trace(), "trace not integral on the order");
    to_i64(basis_[i].norm(), "norm not integral on the order");
  }
  RMat G;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) G[i][j] = gram_[i][j];
  gram_det_ = static_cast<std::int64_t>(boost::multiprecision::abs(det4(G)));
}

QuatElement OrderBasis::element(const OrderCoords& c) const {
  std::array<Rational, 4> x{0, 0, 0, 0};
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) x[i] += Rational(bscaled_[i][j] * c[j]);
  for (auto& v : x) v /= den_;
  return QuatElement(alg_, x);
}

bool OrderBasis::contains(const QuatElement& x) const {
  for (int i = 0; i < 4; ++i) {
    Rational s = 0;
    for (int j = 0; j < 4; ++j) s += Rational(inv_num_[i][j]) * x[j] * den_;
    s /= inv_den_;
    if (boost::multiprecision::denominator(s) != 1) return false;
  }
  return true;
}

OrderCoords OrderBasis::coords(const QuatElement& x) const {
  OrderCoords c{};
  for (int i = 0; i < 4; ++i) {
    Rational s = 0;
    for (int j = 0; j < 4; ++j) s += Rational(inv_num_[i][j]) * x[j] * den_;
    s /= inv_den_;
    if (boost::multiprecision::denominator(s) != 1) throw std::domain_error("element not in order");
    c[i] = static_cast<std::int64_t>(boost::multiprecision::numerator(s));
  }
  return c;
}

bool OrderBasis::from_scaled(const std::array<std::int64_t, 4>& X, OrderCoords& out) const {
  for (int i = 0; i < 4; ++i) {
    i128 s = 0;
    for (int j = 0; j < 4; ++j) s += static_cast<i128>(inv_num_[i][j]) * X[j];
    if (s % inv_den_ != 0) return false;
    out[i] = static_cast<std::int64_t>(s / inv_den_);
  }
  return true;
}

OrderCoords OrderBasis::mul(const OrderCoords& x, const OrderCoords& y) const {
  std::array<i128, 4> acc{};
  for (int i = 0; i < 4; ++i) {
    if (!x[i]) continue;
    for (int j = 0; j < 4; ++j) {
      if (!y[j]) continue;
      const i128 xy = static_cast<i128>(x[i]) * y[j];
      for (int k = 0; k < 4; ++k) acc[k] += xy * mult_[i][j][k];
    }
  }
  return {static_cast<std::int64_t>(acc[0]), static_cast<std::int64_t>(acc[1]),
          static_cast<std::int64_t>(acc[2]), static_cast<std::int64_t>(acc[3])};
}

OrderCoords OrderBasis::conj(const OrderCoords& x) const {
  OrderCoords out{};
  for (int k = 0; k < 4; ++k)
    for (int j = 0; j < 4; ++j) out[k] += conj_[k][j] * x[j];
  return out;
}

std::int64_t OrderBasis::norm(const OrderCoords& x) const {
  i128 s = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) s += static_cast<i128>(x[i]) * x[j] * gram_[i][j];
  return static_cast<std::int64_t>(s / 2);
}

std::int64_t OrderBasis::trace(const OrderCoords& x) const {
  std::int64_t s = 0;
  for (int i = 0; i < 4; ++i) s += trace_[i] * x[i];
  return s;
}

std::array<double, 4> OrderBasis::to_double(const OrderCoords& c) const {
  std::array<double, 4> x{};
  for (int i = 0; i < 4; ++i) {
    std::int64_t s = 0;
    for (int j = 0; j < 4; ++j) s += bscaled_[i][j] * c[j];
    x[i] = static_cast<double>(s) / static_cast<double>(den_);
  }
  return x;
}

std::vector<OrderCoords> enumerate_norm_coords(const OrderBasis& R, std::int64_t m,
                                               const EntryBox& box,
                                               const EnumerationBudget& budget) {
  if (m < 1) throw std::invalid_argument("enumerate_norm needs m >= 1");
  for (double e : box.bound)
    if (!(e > 0)) throw std::invalid_argument("entry bounds must be positive");
  const double a = static_cast<double>(R.algebra().a());
  const double b = static_cast<double>(R.algebra().b());
  const double ra = std::sqrt(a), sm = std::sqrt(static_cast<double>(m));
  const double den = static_cast<double>(R.denom());
  const auto& E = box.bound;
  const double slack = 1.0 + 1e-9;
  const double xi_half = 0.5 * (E[0] + E[3]) * sm * slack;
  const double eta_half = 0.5 * (E[1] + E[2] / std::abs(b)) * sm * slack;
  const auto B0 = static_cast<std::int64_t>(std::floor(den * xi_half)) + 1;
  const auto B1 = static_cast<std::int64_t>(std::floor(den * xi_half / ra)) + 1;
  const auto B2 = static_cast<std::int64_t>(std::floor(den * eta_half)) + 1;
  const auto B3 = static_cast<std::int64_t>(std::floor(den * eta_half / ra)) + 1;
  const double cells = (2.0 * B1 + 1) * (2.0 * B2 + 1) * (2.0 * B3 + 1);
  if (cells > budget.max_cells)
    throw BudgetExceeded("coefficient box of " + std::to_string(cells) + " cells exceeds budget");

  const i128 ai = R.algebra().a(), bi = R.algebra().b();
  const i128 target = static_cast<i128>(R.denom()) * R.denom() * m;
  auto within = [&](const OrderCoords& c) {
    const Mat2 g = R.embed(c);
    return std::abs(g.a) <= E[0] * sm * slack && std::abs(g.b) <= E[1] * sm * slack &&
           std::abs(g.c) <= E[2] * sm * slack && std::abs(g.d) <= E[3] * sm * slack;
  };
  auto slice = [&](std::int64_t lo, std::int64_t hi, std::vector<OrderCoords>& out) {
    for (std::int64_t X1 = lo; X1 <= hi; ++X1)
      for (std::int64_t X2 = -B2; X2 <= B2; ++X2)
        for (std::int64_t X3 = -B3; X3 <= B3; ++X3) {
          const i128 sq = target + ai * X1 * X1 + bi * X2 * X2 - ai * bi * X3 * X3;
          const std::int64_t X0 = isqrt_exact(sq);
          if (X0 < 0 || X0 > B0) continue;
          for (std::int64_t s : {X0, -X0}) {
            OrderCoords c;
            if (R.from_scaled({s, X1, X2, X3}, c) && within(c)) out.push_back(c);
            if (X0 == 0) break;
          }
        }
  };
  const int threads = std::max(1, budget.threads);
  std::vector<std::vector<OrderCoords>> parts(threads);
  const std::int64_t span = 2 * B1 + 1;
  if (threads == 1) {
    slice(-B1, B1, parts[0]);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      const std::int64_t lo = -B1 + span * t / threads;
      const std::int64_t hi = -B1 + span * (t + 1) / threads - 1;
      pool.emplace_back([&, lo, hi, t] { slice(lo, hi, parts[t]); });
    }
    for (auto& th : pool) th.join();
  }
  std::vector<OrderCoords> out;
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

std::vector<QuatElement> enumerate_norm(const OrderBasis& R, std::int64_t m, double entry_bound,
                                        const EnumerationBudget& budget) {
  std::vector<QuatElement> out;
  for (const auto& c : enumerate_norm_coords(R, m, EntryBox::uniform(entry_bound), budget))
    out.push_back(R.element(c));
  return out;
}

bool left_equivalent(const OrderBasis& R, const OrderCoords& x, const OrderCoords& y,
                     std::int64_t m) {
  const auto p = R.mul(x, R.conj(y));
  return std::all_of(p.begin(), p.end(), [m](std::int64_t v) { return v % m == 0; });
}

int classify_coset(const OrderBasis& R, const HeckeSet& set, const OrderCoords& x) {
  for (std::size_t i = 0; i < set.reps.size(); ++i)
    if (left_equivalent(R, x, set.reps[i], set.m)) return static_cast<int>(i);
  return -1;
}

namespace {

double entry_size(const OrderBasis& R, const OrderCoords& c) {
  const Mat2 g = R.embed(c);
  return std::max({std::abs(g.a), std::abs(g.b), std::abs(g.c), std::abs(g.d)});
}

}  // namespace

HeckeSet coset_reps(const OrderBasis& R, std::int64_t m, const CosetSearch& search) {
  if (m < 1) throw std::invalid_argument("coset_reps needs m >= 1");
  if (std::gcd(m, R.q()) != 1) throw std::invalid_argument("coset_reps needs (m, q) = 1");
  const auto expected = sigma1(m);
  HeckeSet set;
  set.m = m;
  for (double E = search.initial_bound; E <= search.max_bound * (1 + 1e-12); E *= search.growth) {
    auto elems = enumerate_norm_coords(R, m, EntryBox::uniform(E), search.budget);
    std::vector<std::pair<double, OrderCoords>> keyed;
    keyed.reserve(elems.size());
    for (const auto& c : elems) keyed.emplace_back(entry_size(R, c), c);
    std::sort(keyed.begin(), keyed.end());
    set.reps.clear();
    set.entry_bound_used = E;
    set.elements_seen = elems.size();
    for (const auto& [sz, c] : keyed) {
      if (classify_coset(R, set, c) < 0) set.reps.push_back(c);
      if (static_cast<std::int64_t>(set.reps.size()) == expected) return set;
    }
  }
  throw IncompleteEnumeration("coset enumeration for m = " + std::to_string(m) + " incomplete",
                              static_cast<long>(set.reps.size()), static_cast<long>(expected));
}

CompositionReport hecke_composition(const OrderBasis& R, std::int64_t p,
                                    const CosetSearch& search) {
  const auto tp = coset_reps(R, p, search);
  const auto tp2 = coset_reps(R, p * p, search);
  CompositionReport rep;
  rep.p = p;
  rep.multiplicity.assign(tp2.reps.size(), 0);
  rep.identity_class = classify_coset(R, tp2, R.coords(QuatElement::scalar(R.algebra(), p)));
  bool all_found = true;
  for (const auto& ai : tp.reps)
    for (const auto& aj : tp.reps) {
      const int k = classify_coset(R, tp2, R.mul(aj, ai));
      if (k < 0) {
        all_found = false;
        continue;
      }
      ++rep.multiplicity[k];
    }
  rep.holds = all_found && rep.identity_class >= 0;
  for (std::size_t k = 0; k < rep.multiplicity.size() && rep.holds; ++k) {
    const int want = (static_cast<int>(k) == rep.identity_class) ? static_cast<int>(p + 1) : 1;
    if (rep.multiplicity[k] != want) rep.holds = false;
  }
  return rep;
}

}  // namespace geoamp
