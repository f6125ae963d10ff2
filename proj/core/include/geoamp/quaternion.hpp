#pragma once

#include <array>
#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>
#include <vector>

#include "geoamp/group.hpp"

namespace geoamp {

using Rational = boost::multiprecision::cpp_rational;

Rational parse_rational(const std::string& s);
std::string to_string(const Rational& r);

// Hilbert symbol (a,b)_p; p = -1 denotes the real place.
int hilbert_symbol(std::int64_t a, std::int64_t b, std::int64_t p);
bool is_squarefree(std::int64_t n);
std::int64_t sigma1(std::int64_t m);
std::vector<std::int64_t> prime_factors(std::int64_t n);

// A = (a, b / Q) with w^2 = a, W^2 = b, wW = -Ww.
class AlgebraSpec {
 public:
  AlgebraSpec(std::int64_t a, std::int64_t b);

  std::int64_t a() const { return a_; }
  std::int64_t b() const { return b_; }
  // Places where the algebra ramifies (-1 for infinity).
  std::vector<std::int64_t> ramified_places() const;
  std::int64_t discriminant() const;
  friend bool operator==(const AlgebraSpec&, const AlgebraSpec&) = default;

 private:
  std::int64_t a_, b_;
};

// x0 + x1 w + x2 W + x3 wW.
class QuatElement {
 public:
  QuatElement(const AlgebraSpec& alg, std::array<Rational, 4> x) : alg_(alg), x_(std::move(x)) {}
  static QuatElement scalar(const AlgebraSpec& alg, const Rational& r) {
    return QuatElement(alg, {r, 0, 0, 0});
  }

  const AlgebraSpec& algebra() const { return alg_; }
  const std::array<Rational, 4>& coeffs() const { return x_; }
  const Rational& operator[](int i) const { return x_[i]; }

  QuatElement conj() const;
  Rational norm() const;
  Rational trace() const;
  bool is_zero() const;

  friend QuatElement operator*(const QuatElement& x, const QuatElement& y);
  friend QuatElement operator+(const QuatElement& x, const QuatElement& y);
  friend QuatElement operator-(const QuatElement& x, const QuatElement& y);
  friend QuatElement operator*(const Rational& s, const QuatElement& x);
  friend bool operator==(const QuatElement& x, const QuatElement& y) {
    return x.alg_ == y.alg_ && x.x_ == y.x_;
  }

 private:
  AlgebraSpec alg_;
  std::array<Rational, 4> x_;
};

enum class QuatOp { mul, conj, norm, trace };
// Either a QuatElement (mul, conj) or a scalar (norm, trace) wrapped as one.
QuatElement quat_arith(const QuatElement& x, const QuatElement& y, QuatOp op);

// [[xi', eta'], [b eta, xi]] with xi = x0 + x1 sqrt(a), eta = x2 + x3 sqrt(a),
// primes denoting sqrt(a) -> -sqrt(a). Multiplicative; det = N(x).
Mat2 embed_matrix(const QuatElement& x);
Mat2 embed_matrix(const AlgebraSpec& alg, const std::array<double, 4>& x);

// Integer coordinates of an order element in its Z-basis.
using OrderCoords = std::array<std::int64_t, 4>;

class OrderBasis {
 public:
  OrderBasis(const AlgebraSpec& alg, std::array<QuatElement, 4> basis, std::int64_t q);

  const AlgebraSpec& algebra() const { return alg_; }
  const std::array<QuatElement, 4>& basis() const { return basis_; }
  std::int64_t q() const { return q_; }
  // |det tr(e_i conj e_j)|, the square of the reduced discriminant.
  std::int64_t gram_determinant() const { return gram_det_; }

  QuatElement element(const OrderCoords& c) const;
  // Throws std::domain_error when x is not in R.
  OrderCoords coords(const QuatElement& x) const;
  bool contains(const QuatElement& x) const;

  OrderCoords mul(const OrderCoords& x, const OrderCoords& y) const;
  OrderCoords conj(const OrderCoords& x) const;
  std::int64_t norm(const OrderCoords& x) const;
  std::int64_t trace(const OrderCoords& x) const;
  std::array<double, 4> to_double(const OrderCoords& x) const;
  Mat2 embed(const OrderCoords& x) const { return embed_matrix(alg_, to_double(x)); }

  // Scaled rational coordinates: x_i = X_i / denom().
  std::int64_t denom() const { return den_; }
  // Order coordinates from scaled coordinates, false when not integral.
  bool from_scaled(const std::array<std::int64_t, 4>& X, OrderCoords& out) const;

 private:
  AlgebraSpec alg_;
  std::array<QuatElement, 4> basis_;
  std::int64_t q_;
  std::int64_t den_ = 1;
  std::array<std::array<std::int64_t, 4>, 4> bscaled_{};  // X = bscaled * c
  std::array<std::array<std::int64_t, 4>, 4> inv_num_{};  // c = inv_num * X / inv_den
  std::int64_t inv_den_ = 1;
  std::array<std::array<std::array<std::int64_t, 4>, 4>, 4> mult_{};  // e_i e_j = sum_k mult_[i][j][k] e_k
  std::array<std::array<std::int64_t, 4>, 4> conj_{};                 // conj(c)_k = sum_j conj_[k][j] c_j
  std::array<std::array<std::int64_t, 4>, 4> gram_{};                 // tr(e_i conj e_j)
  std::array<std::int64_t, 4> trace_{};
  std::int64_t gram_det_ = 0;
};

// Entry box for an enumeration: |phi(alpha)_ij| <= bound_ij * sqrt(m).
struct EntryBox {
  std::array<double, 4> bound{};  // (11, 12, 21, 22)
  static EntryBox uniform(double e) { return {{e, e, e, e}}; }
};

struct EnumerationBudget {
  double max_cells = 2e9;
  int threads = 1;
};

std::vector<OrderCoords> enumerate_norm_coords(const OrderBasis& R, std::int64_t m,
                                               const EntryBox& box,
                                               const EnumerationBudget& budget = {});
std::vector<QuatElement> enumerate_norm(const OrderBasis& R, std::int64_t m, double entry_bound,
                                        const EnumerationBudget& budget = {});

// alpha ~ beta iff alpha conj(beta) in m R.
bool left_equivalent(const OrderBasis& R, const OrderCoords& x, const OrderCoords& y,
                     std::int64_t m);

struct HeckeSet {
  std::int64_t m = 1;
  std::vector<OrderCoords> reps;
  double entry_bound_used = 0;
  std::size_t elements_seen = 0;
};

struct CosetSearch {
  double initial_bound = 2.0;
  double growth = 1.5;
  double max_bound = 64.0;
  EnumerationBudget budget{};
};

// Left coset representatives of R(1)\R(m) for (m, q) = 1, certified by the
// count reaching sigma1(m). Throws IncompleteEnumeration otherwise.
HeckeSet coset_reps(const OrderBasis& R, std::int64_t m, const CosetSearch& search = {});

// Index of the representative equivalent to x, or -1.
int classify_coset(const OrderBasis& R, const HeckeSet& set, const OrderCoords& x);

struct CompositionReport {
  std::int64_t p = 0;
  std::vector<int> multiplicity;  // per rep of T_{p^2}
  int identity_class = -1;        // class of p * 1
  bool holds = false;
};

// Checks T_p T_p = T_{p^2} + p Id as a multiset identity on cosets.
CompositionReport hecke_composition(const OrderBasis& R, std::int64_t p,
                                    const CosetSearch& search = {});

}  // namespace geoamp
