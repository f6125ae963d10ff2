#include "geoamp/counting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "geoamp/errors.hpp"

namespace geoamp {

namespace {

constexpr double kInfEndpoint = 1e12;

GeodesicForm form_from_endpoints(double e1, double e2, bool e2_infinite) {
  if (e2_infinite) return {0.0, 1.0, -e1};  // y (x - e1 y)
  const double w = std::abs(e1 - e2);
  return {1.0 / w, -(e1 + e2) / w, e1 * e2 / w};
}

}  // namespace

GeodesicForm geodesic_form(const GeodesicSegment& l) {
  const Mat2& g = l.base().matrix();
  // Endpoints g(0) = b/d and g(inf) = a/c.
  const bool d0 = std::abs(g.d) * kInfEndpoint < std::abs(g.b);
  const bool c0 = std::abs(g.c) * kInfEndpoint < std::abs(g.a);
  if (c0) return form_from_endpoints(g.b / g.d, 0.0, true);
  if (d0) return form_from_endpoints(g.a / g.c, 0.0, true);
  return form_from_endpoints(g.b / g.d, g.a / g.c, false);
}

GeodesicForm transform_form(const GeodesicForm& f, const Mat2& g) {
  // Q'(v) = Q(g^{-1} v) with g^{-1} = [[d, -b], [-c, a]].
  const double p = g.d, q = -g.b, r = -g.c, s = g.a;
  return {f.alpha * p * p + f.beta * p * r + f.gamma * r * r,
          2 * f.alpha * p * q + f.beta * (p * s + q * r) + 2 * f.gamma * r * s,
          f.alpha * q * q + f.beta * q * s + f.gamma * s * s};
}

Mat2 stabilizer_element(const GeodesicForm& f, double r) {
  const double t = std::cosh(r), u = std::sinh(r);
  return {t - f.beta * u, -2 * f.gamma * u, 2 * f.alpha * u, t + f.beta * u};
}

double counting_entry_bound(const GeodesicSegment& l) {
  const cplx i(0, 1);
  const double rho = std::max(hyperbolic_distance(l.point(0), i),
                              hyperbolic_distance(l.point(l.length()), i));
  // d(i, gamma i) <= 2 rho + 1 and |entry| <= ||gamma||_F = sqrt(2 cosh d(i, gamma i)).
  return std::sqrt(2 * std::cosh(2 * rho + 1)) * (1 + 1e-9);
}

double prefilter_statistic(const GeodesicForm& f, double a, std::int64_t n,
                           const std::array<double, 4>& x) {
  const double nn = static_cast<double>(n);
  return std::abs(x[0] * x[0] - (a / (f.beta * f.beta)) * x[1] * x[1] - nn) / nn;
}

std::vector<CountRecord> count_M_grid(const GeodesicSegment& l, std::int64_t n,
                                      std::span<const double> kappas, const OrderBasis& R,
                                      const CountOptions& opt) {
  if (n < 1) throw std::invalid_argument("count_M: n must be >= 1");
  for (double k : kappas)
    if (!(k > 0) || k > 2) throw std::invalid_argument("count_M: kappa must lie in (0, 2]");
  const GeodesicForm form = geodesic_form(l);
  const bool use_prefilter = opt.prefilter.enabled && std::abs(form.beta) > 1e-6;
  const double a = static_cast<double>(R.algebra().a());
  const double kmax = kappas.empty() ? 0.0 : *std::max_element(kappas.begin(), kappas.end());
  const double box = counting_entry_bound(l);
  const auto elems = enumerate_norm_coords(R, n, EntryBox::uniform(box), opt.budget);
  const double rootn = std::sqrt(static_cast<double>(n));

  std::vector<CountRecord> out(kappas.size());
  for (std::size_t k = 0; k < kappas.size(); ++k) {
    const double kap = kappas[k];
    out[k].n = n;
    out[k].kappa = kap;
    out[k].bound = (kap * kap + std::sqrt(kap)) * static_cast<double>(n) + 1.0;
    out[k].enumerated = static_cast<std::int64_t>(elems.size());
    if (opt.audit) out[k].false_rejections = 0;
  }

  for (const auto& c : elems) {
    const std::array<double, 4> x = R.to_double(c);
    const double stat = use_prefilter ? prefilter_statistic(form, a, n, x) : 0.0;
    const bool pre_any = !use_prefilter || stat <= opt.prefilter.constant * kmax;
    if (!pre_any && !opt.audit) continue;
    const Mat2 m = (1.0 / rootn) * R.embed(c);
    const GeodesicSegment gl = l.translated(GroupElement(m));
    if (dist_geodesics(l, gl) > 1.0) {
      if (pre_any)
        for (std::size_t k = 0; k < kappas.size(); ++k)
          if (!use_prefilter || stat <= opt.prefilter.constant * kappas[k]) ++out[k].prefilter_passed;
      continue;
    }
    const double na = n_align(l, gl);
    for (std::size_t k = 0; k < kappas.size(); ++k) {
      const bool pre = !use_prefilter || stat <= opt.prefilter.constant * kappas[k];
      const bool geo = na < kappas[k];
      if (pre) ++out[k].prefilter_passed;
      if (geo && pre) ++out[k].count;
      if (opt.audit && geo) {
        if (!pre) ++out[k].false_rejections;
        out[k].max_statistic_ratio = std::max(out[k].max_statistic_ratio, stat / kappas[k]);
      }
    }
  }
  for (auto& r : out) r.ratio = static_cast<double>(r.count) / r.bound;
  return out;
}

CountRecord count_M(const GeodesicSegment& l, std::int64_t n, double kappa, const OrderBasis& R,
                    const CountOptions& opt) {
  const double k[1] = {kappa};
  return count_M_grid(l, n, k, R, opt).front();
}

AmplifierSumReport amplifier_sum_checks(std::span<const std::complex<double>> alpha) {
  const int N = static_cast<int>(alpha.size());
  if (N < 1 || N > 10000) throw std::invalid_argument("amplifier_sum_checks: need 1 <= N <= 10^4");
  // Exact divisor sums d(g) = sum_{d | g} d and the count tau(g).
  std::vector<std::int64_t> sig(N + 1, 0), tau(N + 1, 0);
  for (int d = 1; d <= N; ++d)
    for (int g = d; g <= N; g += d) {
      sig[g] += d;
      ++tau[g];
    }
  std::vector<double> mag(N + 1, 0.0);
  double l1 = 0, l2 = 0;
  for (int i = 1; i <= N; ++i) {
    mag[i] = std::abs(alpha[i - 1]);
    l1 += mag[i];
    l2 += mag[i] * mag[i];
  }
  AmplifierSumReport r;
  r.N = N;
  for (int n = 1; n <= N; ++n) {
    if (mag[n] == 0) continue;
    for (int m = 1; m <= N; ++m) {
      if (mag[m] == 0) continue;
      const int g = std::gcd(n, m);
      const double w = mag[n] * mag[m];
      const double root = std::sqrt(static_cast<double>(n) * m);
      // sum_{d | g} 1/d = sigma(g) / g
      r.lhs1 += w * root * static_cast<double>(sig[g]) / g;
      r.lhs2 += w * static_cast<double>(sig[g]) / root;
    }
  }
  r.rhs1_base = N * l1 * l1;
  r.rhs2_base = l2;
  r.constant1 = r.lhs1 / r.rhs1_base;
  r.constant2 = r.lhs2 / r.rhs2_base;
  const double logN = std::log(std::max(2, N));
  r.eps1 = std::log(r.constant1) / logN;
  r.eps2 = std::log(r.constant2) / logN;
  double harmonic = 0;
  std::int64_t tau_max = 0;
  double sigm_max = 0;
  for (int i = 1; i <= N; ++i) {
    harmonic += 1.0 / i;
    tau_max = std::max(tau_max, tau[i]);
    sigm_max = std::max(sigm_max, static_cast<double>(sig[i]) / i);
  }
  r.bound1 = sigm_max;
  r.bound2 = static_cast<double>(tau_max) * harmonic;
  r.holds = r.constant1 <= r.bound1 * (1 + 1e-12) && r.constant2 <= r.bound2 * (1 + 1e-12);
  return r;
}

}  // namespace geoamp
