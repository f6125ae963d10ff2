#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "geoamp/group.hpp"
#include "geoamp/quaternion.hpp"

namespace geoamp {

// Binary quadratic form alpha x^2 + beta x y + gamma y^2 vanishing at the endpoints
// of the complete geodesic through a segment, scaled to discriminant 1.
struct GeodesicForm {
  double alpha = 0, beta = 0, gamma = 0;
  double discriminant() const { return beta * beta - 4 * alpha * gamma; }
  double operator()(double x, double y) const { return alpha * x * x + beta * x * y + gamma * y * y; }
};

GeodesicForm geodesic_form(const GeodesicSegment& l);
// The form of g l computed by transforming the form of l (Q o g^{-1}).
GeodesicForm transform_form(const GeodesicForm& f, const Mat2& g);
// [[t - beta u, -2 gamma u], [2 alpha u, t + beta u]] with t = cosh r, u = sinh r.
Mat2 stabilizer_element(const GeodesicForm& f, double r);

// Entry bound C with |phi(gamma)_ij| <= C sqrt(n) for every gamma in R(n) with d(gamma l, l) <= 1.
double counting_entry_bound(const GeodesicSegment& l);

struct PrefilterConfig {
  double constant = 6.0;  // |x0^2 - (a / beta^2) x1^2 - n| <= constant * n * kappa
  bool enabled = true;
};

// The statistic |x0^2 - (a / beta^2) x1^2 - n| / n for an element with standard coordinates x.
double prefilter_statistic(const GeodesicForm& f, double a, std::int64_t n,
                           const std::array<double, 4>& x);

struct CountRecord {
  std::int64_t n = 0;
  double kappa = 0;
  std::int64_t count = 0;
  double bound = 0;  // (kappa^2 + kappa^{1/2}) n + 1
  double ratio = 0;
  std::int64_t enumerated = 0;
  std::int64_t prefilter_passed = 0;
  std::int64_t false_rejections = -1;  // -1 when not audited
  double max_statistic_ratio = 0;      // max statistic / kappa over geometric survivors (audit)
};

struct CountOptions {
  PrefilterConfig prefilter{};
  bool audit = false;  // evaluate the geometric tests on every element as well
  EnumerationBudget budget{};
};

// M(l, n, kappa) = #{gamma in R(n) : d(gamma l, l) <= 1, n(l, gamma l) < kappa}.
CountRecord count_M(const GeodesicSegment& l, std::int64_t n, double kappa, const OrderBasis& R,
                    const CountOptions& opt = {});

// All kappas for one n, sharing the enumeration.
std::vector<CountRecord> count_M_grid(const GeodesicSegment& l, std::int64_t n,
                                      std::span<const double> kappas, const OrderBasis& R,
                                      const CountOptions& opt = {});

struct AmplifierSumReport {
  int N = 0;
  double lhs1 = 0, rhs1_base = 0;  // sum sqrt(nm)/d |a_n a_m| versus N (sum |a_n|)^2
  double lhs2 = 0, rhs2_base = 0;  // sum d / sqrt(nm) |a_n a_m| versus sum |a_n|^2
  double constant1 = 0, constant2 = 0;  // lhs / base
  double eps1 = 0, eps2 = 0;            // log(constant) / log N
  double bound1 = 0, bound2 = 0;        // max sigma_{-1}(g), max tau(n) H_N
  bool holds = false;                   // constant_i <= bound_i
};

AmplifierSumReport amplifier_sum_checks(std::span<const std::complex<double>> alpha);

}  // namespace geoamp
