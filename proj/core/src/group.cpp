#include "geoamp/group.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <limits>
#include <stdexcept>
#include <vector>

#include "geoamp/errors.hpp"

namespace geoamp {

double Mat2::max_abs_diff(const Mat2& o) const {
  return std::max({std::abs(a - o.a), std::abs(b - o.b), std::abs(c - o.c), std::abs(d - o.d)});
}

Mat2 mat_k(double theta) {
  const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
  return {c, s, -s, c};
}

Mat2 mat_a(double y) { return {std::exp(0.5 * y), 0.0, 0.0, std::exp(-0.5 * y)}; }

Mat2 mat_n(double x) { return {1.0, x, 0.0, 1.0}; }

GroupElement::GroupElement(const Mat2& m) : m_(m) {
  const double det = m.det();
  if (!(std::abs(det - 1.0) < 1e-9))
    throw std::invalid_argument("GroupElement: determinant is not 1");
  m_ = (1.0 / std::sqrt(det)) * m_;
  if (m_.a < 0.0 || (m_.a == 0.0 && m_.b < 0.0)) m_ = -m_;
}

Mat2 exp_lie(const LieVector& x) {
  // X^2 = q I with q = -det X.
  const double q = x.x1 * x.x1 + x.x2 * x.x3;
  double ch, sh;
  if (q > 0) {
    const double r = std::sqrt(q);
    ch = std::cosh(r);
    sh = std::sinh(r) / r;
  } else if (q < 0) {
    const double r = std::sqrt(-q);
    ch = std::cos(r);
    sh = std::sin(r) / r;
  } else {
    ch = 1.0;
    sh = 1.0;
  }
  const Mat2 m = x.matrix();
  return Mat2{ch, 0, 0, ch} + sh * m;
}

namespace {

// phi / sinh(phi) with cosh(phi) = 1 + u, continued analytically to u < 0.
double log_scale(double u) {
  if (std::abs(u) < 1e-4) return 1.0 - u / 3.0 + 2.0 * u * u / 15.0 - 2.0 * u * u * u / 35.0;
  if (u > 0) {
    const double phi = std::acosh(1.0 + u);
    return phi / std::sinh(phi);
  }
  const double phi = std::acos(1.0 + u);
  return phi / std::sin(phi);
}

}  // namespace

LieVector log_chart(const Mat2& m0) {
  Mat2 m = m0;
  if (m.trace() < 0) m = -m;
  const double half = 0.5 * m.trace();
  if (half < 1e-12) throw OutOfChart("log_chart: trace vanishes, logarithm is not unique");
  const double s = log_scale(half - 1.0);
  return LieVector::from_matrix(s * (m - Mat2{half, 0, 0, half}));
}

double wrap_angle(double t) {
  double r = std::remainder(t, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

double k_angle(const Mat2& g) { return wrap_angle(2.0 * std::atan2(-g.c, g.d)); }

IwasawaCoords iwasawa(const Mat2& g) {
  const double r2 = g.c * g.c + g.d * g.d;
  return {(g.a * g.c + g.b * g.d) / r2, -std::log(r2), k_angle(g)};
}

Mat2 compose(const IwasawaCoords& c) { return mat_n(c.x) * mat_a(c.y) * mat_k(c.theta); }

double angle_map_sigma(const Mat2& g, double theta) { return k_angle(mat_k(theta) * g); }

double angle_map_sigma_derivative(const Mat2& g, double theta) {
  return std::exp(A_height(mat_k(theta) * g));
}

double A_derivative(const Mat2& g) { return std::cos(k_angle(g)); }

double avanish_mixed_derivative(double y, double h) {
  auto f = [y](double t, double u) { return A_height(mat_k(t) * mat_a(y) * mat_n(u)); };
  return (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h);
}

cplx mobius(const Mat2& g, cplx z) { return (g.a * z + g.b) / (g.c * z + g.d); }

double hyperbolic_distance(cplx z, cplx w) {
  return 2.0 * std::asinh(std::abs(z - w) / (2.0 * std::sqrt(z.imag() * w.imag())));
}

double dist_group(const Mat2& g, const Mat2& h) { return log_chart(g.inverse_sl2() * h).norm(); }

GeodesicSegment::GeodesicSegment(GroupElement base, double length)
    : base_(base), length_(length) {
  if (!(length > 0)) throw std::invalid_argument("GeodesicSegment: length must be positive");
}

cplx GeodesicSegment::point(double x) const {
  return mobius(base_.matrix(), cplx(0.0, std::exp(x)));
}

double dist_point_segment(cplx p, const GeodesicSegment& s) {
  const cplx q = mobius(s.base().matrix().inverse_sl2(), p);
  const double x = std::clamp(std::log(std::abs(q)), 0.0, s.length());
  return hyperbolic_distance(q, cplx(0.0, std::exp(x)));
}

double dist_geodesics(const GeodesicSegment& l1, const GeodesicSegment& l2) {
  double best = std::min({dist_point_segment(l1.point(0.0), l2),
                          dist_point_segment(l1.point(l1.length()), l2),
                          dist_point_segment(l2.point(0.0), l1),
                          dist_point_segment(l2.point(l2.length()), l1)});
  // Interior critical points: work in coordinates where l2 lies on the imaginary axis.
  const Mat2 m = l2.base().matrix().inverse_sl2() * l1.base().matrix();
  constexpr double tiny = 1e-13;
  if (std::abs(m.c) < tiny || std::abs(m.d) < tiny) return best;
  const double e0 = m.b / m.d, e1 = m.a / m.c;
  const double centre = 0.5 * (e0 + e1), radius = 0.5 * std::abs(e1 - e0);
  const Mat2 minv = m.inverse_sl2();
  auto param_on_l1 = [&](cplx p) { return std::log(mobius(minv, p).imag()); };
  auto inside = [](double x, double len) { return x >= 0.0 && x <= len; };
  const double prod = e0 * e1;
  if (prod < 0) {
    const cplx p(0.0, std::sqrt(-prod));
    if (inside(std::log(p.imag()), l2.length()) && inside(param_on_l1(p), l1.length())) return 0.0;
  } else if (prod > 0 && std::abs(centre) > tiny) {
    const double rho = std::sqrt(prod);
    const double xr = rho * rho / centre;
    const double yr = std::sqrt(std::max(0.0, rho * rho - xr * xr));
    if (yr > 0 && radius > 0) {
      const cplx foot1(xr, yr), foot2(0.0, rho);
      if (inside(std::log(rho), l2.length()) && inside(param_on_l1(foot1), l1.length()))
        best = std::min(best, hyperbolic_distance(foot1, foot2));
    }
  }
  return best;
}

double align_to_A(const Mat2& m, double* t_star) {
  constexpr double ceiling2 = kAlignCeiling * kAlignCeiling;
  auto f = [&m](double t) {
    try {
      const double v = log_chart(mat_a(-t) * m).norm();
      return v * v < ceiling2 ? v * v : ceiling2;
    } catch (const OutOfChart&) {
      return ceiling2;
    }
  };
  const double t0 = iwasawa(m).y;
  constexpr int samples = 256;
  constexpr double half_width = 8.0;
  const double step = 2.0 * half_width / (samples - 1);
  int best_i = 0;
  double best_v = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double v = f(t0 - half_width + i * step);
    if (v < best_v) {
      best_v = v;
      best_i = i;
    }
  }
  const double lo = t0 - half_width + std::max(0, best_i - 1) * step;
  const double hi = t0 - half_width + std::min(samples - 1, best_i + 1) * step;
  const auto [t, v] = boost::math::tools::brent_find_minima(f, lo, hi, 52);
  const double val = std::min(v, best_v);
  if (t_star) *t_star = v <= best_v ? t : t0 - half_width + best_i * step;
  return std::min(kAlignCeiling, std::sqrt(val));
}

double n_align(const GeodesicSegment& l1, const GeodesicSegment& l2) {
  return align_to_A(l1.base().matrix().inverse_sl2() * l2.base().matrix());
}

}  // namespace geoamp
