#include "geoamp/phase.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "geoamp/errors.hpp"

namespace geoamp {

namespace {

double horizontal(const Mat2& m) { return iwasawa(m).x; }

double dist_to_vertical_angle(double t) {
  const double w = wrap_angle(t);
  return std::min(std::abs(w), kPi - std::abs(w));
}

int sign_of(double v) { return v >= 0 ? 1 : -1; }

}  // namespace

PhaseContext::PhaseContext(const Mat2& g, double rho, double delta)
    : g_(GroupElement(g).matrix()), rho_(rho), alpha_(std::acos(rho)), delta_(delta) {
  if (!(delta > 0 && delta < 0.5)) throw std::invalid_argument("PhaseContext: delta in (0, 1/2)");
  if (rho != 0.0 && (rho < delta || rho > 1.0 - delta))
    throw std::invalid_argument("PhaseContext: rho must be 0 or lie in [delta, 1 - delta]");
}

double phase_value(double x1, double x2, double theta, const PhaseContext& ctx) {
  const Mat2 k = mat_k(theta);
  return ctx.rho() * (x1 - x2) - A_height(k * mat_a(x1)) + A_height(k * ctx.g() * mat_a(x2));
}

std::array<double, 3> phase_gradient(double x1, double x2, double theta, const PhaseContext& ctx) {
  const Mat2 k = mat_k(theta);
  const Mat2 p1 = k * mat_a(x1), p2 = k * ctx.g() * mat_a(x2);
  return {ctx.rho() - A_derivative(p1), -ctx.rho() + A_derivative(p2),
          horizontal(p2) - horizontal(p1)};
}

bool near_singular(double theta, const PhaseContext& ctx, double tol) {
  return dist_to_vertical_angle(theta) < tol ||
         dist_to_vertical_angle(angle_map_sigma(ctx.g(), theta)) < tol;
}

std::vector<double> singular_angles(const PhaseContext& ctx) {
  const Mat2 ginv = ctx.g().inverse_sl2();
  std::vector<double> out{0.0, kPi, wrap_angle(angle_map_sigma(ginv, 0.0)),
                          wrap_angle(angle_map_sigma(ginv, kPi))};
  std::sort(out.begin(), out.end());
  return out;
}

XiPoints xi_points(double theta, const PhaseContext& ctx) {
  if (near_singular(theta, ctx)) throw OnSingularSet("rotated geodesic is vertical");
  XiPoints p;
  p.sigma = angle_map_sigma(ctx.g(), theta);
  const double ta = std::log(std::tan(0.5 * ctx.alpha()));
  const double t1 = std::tan(0.5 * theta), t2 = std::tan(0.5 * p.sigma);
  p.eps1 = sign_of(t1);
  p.eps2 = sign_of(t2);
  p.xi1 = ta - std::log(std::abs(t1));
  p.xi2 = ta - std::log(std::abs(t2));
  return p;
}

double reduced_psi(double theta, const PhaseContext& ctx) {
  const auto p = xi_points(theta, ctx);
  return phase_value(p.xi1, p.xi2, theta, ctx);
}

double reduced_psi_derivative(double theta, const PhaseContext& ctx) {
  const auto p = xi_points(theta, ctx);
  const Mat2 k = mat_k(theta);
  return horizontal(k * ctx.g() * mat_a(p.xi2)) - horizontal(k * mat_a(p.xi1));
}

double psi_derivative_fd(double theta, const PhaseContext& ctx, int order, double step) {
  auto f = [&](double t) { return reduced_psi(t, ctx); };
  auto central = [&](double h) {
    switch (order) {
      case 1:
        return (f(theta + h) - f(theta - h)) / (2 * h);
      case 2:
        return (f(theta + h) - 2 * f(theta) + f(theta - h)) / (h * h);
      case 3:
        return (f(theta + 2 * h) - 2 * f(theta + h) + 2 * f(theta - h) - f(theta - 2 * h)) /
               (2 * h * h * h);
      default:
        throw std::invalid_argument("psi_derivative_fd: order must be 1, 2 or 3");
    }
  };
  return (4.0 * central(0.5 * step) - central(step)) / 3.0;
}

CriticalPoint critical_point_at(double theta, const PhaseContext& ctx) {
  const auto p = xi_points(theta, ctx);
  const Mat2 k = mat_k(theta);
  CriticalPoint cp;
  cp.theta = wrap_angle(theta);
  cp.x1 = p.xi1;
  cp.x2 = p.xi2;
  cp.beta1 = p.eps1 * ctx.alpha();
  cp.beta2 = p.eps2 * ctx.alpha();
  const double A1 = A_height(k * mat_a(p.xi1));
  cp.h = A_height(k * ctx.g() * mat_a(p.xi2)) - A1;
  cp.kappa = std::exp(A1);
  return cp;
}

CriticalSet find_critical_points_in(const PhaseContext& ctx, double lo, double hi, int panels) {
  if (!(hi > lo) || hi - lo > 2 * kPi + 1e-12)
    throw std::invalid_argument("find_critical_points_in: need lo < hi <= lo + 2 pi");
  CriticalSet out;
  if (align_to_A(ctx.g()) < 1e-6) {
    out.continuum = true;
    return out;
  }
  // Cut the arc at the singular angles lifted into [lo, hi].
  std::vector<double> cuts{lo, hi};
  for (double s : singular_angles(ctx))
    for (int k = -2; k <= 2; ++k) {
      const double v = s + 2 * kPi * k;
      if (v > lo && v < hi) cuts.push_back(v);
    }
  std::sort(cuts.begin(), cuts.end());
  constexpr double margin = 1e-5;
  auto f = [&](double t) { return reduced_psi_derivative(t, ctx); };
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i] + margin, b = cuts[i + 1] - margin;
    if (b <= a) continue;
    const int n = std::max(8, static_cast<int>(std::lround(panels * (b - a) / (hi - lo))));
    double ta = a, fa = near_singular(a, ctx, 0.5 * margin) ? NAN : f(a);
    for (int j = 1; j <= n; ++j) {
      const double tb = a + (b - a) * j / n;
      const double fb = near_singular(tb, ctx, 0.5 * margin) ? NAN : f(tb);
      if (std::isfinite(fa) && std::isfinite(fb) && fa * fb <= 0) {
        double root;
        if (fa == 0) {
          root = ta;
        } else if (fb == 0) {
          root = tb;
        } else {
          std::uintmax_t iters = 200;
          const auto br = boost::math::tools::toms748_solve(
              f, ta, tb, fa, fb, boost::math::tools::eps_tolerance<double>(52), iters);
          root = 0.5 * (br.first + br.second);
        }
        const auto cp = critical_point_at(root, ctx);
        const bool dup = !out.points.empty() &&
                         std::abs(wrap_angle(out.points.back().theta - cp.theta)) < 1e-12;
        if (!dup) out.points.push_back(cp);
      }
      ta = tb;
      fa = fb;
    }
  }
  return out;
}

CriticalSet find_critical_points(const PhaseContext& ctx, int panels) {
  return find_critical_points_in(ctx, -kPi, kPi, panels);
}

double det3(const Mat3& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

Mat3 hessian_analytic(const CriticalPoint& cp, const PhaseContext& ctx) {
  const double s2 = std::pow(std::sin(ctx.alpha()), 2);
  const double eh = std::exp(cp.h);
  const double d13 = cp.kappa * std::sin(cp.beta1);
  const double d23 = -cp.kappa * eh * std::sin(cp.beta2);
  return {{{s2, 0.0, d13},
           {0.0, -s2, d23},
           {d13, d23, cp.kappa * cp.kappa * (1.0 - eh * eh) / 2.0}}};
}

double hessian_det_formula(const CriticalPoint& cp, const PhaseContext& ctx) {
  return 0.5 * cp.kappa * cp.kappa * std::pow(std::sin(ctx.alpha()), 4) *
         (1.0 - std::exp(2.0 * cp.h));
}

Mat3 hessian_numeric(const CriticalPoint& cp, const PhaseContext& ctx, double step) {
  const std::array<double, 3> x0{cp.x1, cp.x2, cp.theta};
  auto f = [&](std::array<double, 3> x) { return phase_value(x[0], x[1], x[2], ctx); };
  // theta-curvature grows like kappa^2
  const std::array<double, 3> scale{1.0, 1.0, 1.0 / std::max(1.0, std::abs(cp.kappa))};
  auto at = [&](int i, double di, int j, double dj) {
    auto x = x0;
    x[i] += di * scale[i];
    x[j] += dj * scale[j];
    return f(x);
  };
  auto central = [&](double h) {
    Mat3 m{};
    const double f0 = f(x0);
    for (int i = 0; i < 3; ++i) {
      m[i][i] = (at(i, h, i, 0) - 2 * f0 + at(i, -h, i, 0)) / (h * h * scale[i] * scale[i]);
      for (int j = i + 1; j < 3; ++j) {
        m[i][j] = m[j][i] =
            (at(i, h, j, h) - at(i, h, j, -h) - at(i, -h, j, h) + at(i, -h, j, -h)) /
            (4 * h * h * scale[i] * scale[j]);
      }
    }
    return m;
  };
  const Mat3 a = central(step), b = central(0.5 * step);
  Mat3 out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[i][j] = (4.0 * b[i][j] - a[i][j]) / 3.0;
  return out;
}

Mat3 hessian_paper_display(const CriticalPoint& cp, const PhaseContext& ctx) {
  Mat3 d = hessian_analytic(cp, ctx);
  d[0][0] *= 0.5;
  d[1][1] *= 0.5;
  return d;
}

double paper_det_formula(const CriticalPoint& cp, const PhaseContext& ctx) {
  return 0.75 * hessian_det_formula(cp, ctx);
}

double paper_psi_second_formula(const CriticalPoint& cp) { return 3.0 * psi_second_formula(cp); }

double psi_second_formula(const CriticalPoint& cp) {
  return -0.5 * cp.kappa * cp.kappa * (1.0 - std::exp(2.0 * cp.h));
}

const char* to_string(DegeneracyClass c) {
  switch (c) {
    case DegeneracyClass::nondegenerate:
      return "nondegenerate";
    case DegeneracyClass::D1:
      return "D1";
    case DegeneracyClass::D2plus:
      return "D2plus";
    case DegeneracyClass::D2minus:
      return "D2minus";
    case DegeneracyClass::lambda0_degenerate:
      return "lambda0-degenerate";
  }
  return "unknown";
}

std::optional<IntersectionData> intersect_with_reference(const Mat2& g) {
  if (std::abs(g.c) < 1e-14 || std::abs(g.d) < 1e-14) return std::nullopt;
  const double e0 = g.b / g.d, e1 = g.a / g.c;
  if (!(e0 * e1 < 0)) return std::nullopt;
  IntersectionData out;
  out.y = 0.5 * std::log(-e0 * e1);
  const Mat2 m = mat_a(-out.y) * g;
  // m = k(phi) a(y2) sends e^{-y2} i to i
  out.y2 = -std::log(std::abs(mobius(m.inverse_sl2(), cplx(0, 1))));
  const Mat2 k = m * mat_a(-out.y2);
  out.angle = wrap_angle(2.0 * std::atan2(k.b, k.a));
  return out;
}

DegeneracyLabel classify_degeneracy(const PhaseContext& ctx, const DegeneracyTolerance& tol) {
  DegeneracyLabel out;
  if (ctx.rho() == 0.0) {
    const Mat2 w = mat_k(kPi);
    if (align_to_A(ctx.g()) < tol.align || align_to_A(w.inverse_sl2() * ctx.g()) < tol.align)
      out.cls = DegeneracyClass::lambda0_degenerate;
    return out;
  }
  if (align_to_A(ctx.g()) < tol.align) {
    out.cls = DegeneracyClass::D1;
    return out;
  }
  const auto ix = intersect_with_reference(ctx.g());
  if (!ix) return out;
  const double two_alpha = 2.0 * ctx.alpha();
  const double cot_half_alpha = 1.0 / std::tan(0.5 * ctx.alpha());
  double c;
  if (std::abs(wrap_angle(ix->angle - two_alpha)) < tol.angle) {
    out.cls = DegeneracyClass::D2plus;
    c = -std::exp(ix->y) * cot_half_alpha;
  } else if (std::abs(wrap_angle(ix->angle + two_alpha)) < tol.angle) {
    out.cls = DegeneracyClass::D2minus;
    c = std::exp(ix->y) * cot_half_alpha;
  } else {
    return out;
  }
  out.y = ix->y;
  out.theta_witness = wrap_angle(2.0 * std::atan2(1.0, c));
  return out;
}

double ann1_xi(double theta, double x, double y) {
  const double a = k_angle(mat_k(theta) * mat_n(x) * mat_a(y));
  const double s = std::sin(0.5 * a);
  return 2.0 * s * s / (theta * theta);
}

double ann2_xi(double y, double theta) {
  const double v = (y - A_height(mat_k(theta) * mat_a(y))) / y;
  const double r = std::sqrt(std::max(0.0, v));
  return theta > 0 ? r : (theta < 0 ? -r : 0.0);
}

UniformizeReport uniformize_checks(const UniformizeParams& p) {
  if (p.theta_max > 0.5) throw OutOfChart("uniformize_checks: theta beyond the small-angle chart");
  if (p.grid < 2) throw std::invalid_argument("uniformize_checks: grid >= 2");
  UniformizeReport r;
  r.ann1_min = INFINITY;
  r.ann2_min_jacobian = INFINITY;
  const int n = p.grid;
  constexpr double h = 1e-4;
  for (int i = 0; i < n; ++i) {
    // theta grid symmetric about 0 that avoids 0 itself
    const double th = p.theta_max * (-1.0 + (2.0 * i + 1.0) / n);
    for (int j = 0; j < n; ++j) {
      const double x = p.xy_max * (-1.0 + 2.0 * j / (n - 1));
      for (int k = 0; k < n; ++k) {
        const double y = p.xy_max * (-1.0 + 2.0 * k / (n - 1));
        r.ann1_min = std::min(r.ann1_min, std::abs(ann1_xi(th, x, y)));
        const double dy = (ann1_xi(th, x, y + h) - ann1_xi(th, x, y - h)) / (2 * h);
        r.ann1_dy_max = std::max(r.ann1_dy_max, std::abs(dy));
      }
    }
  }
  for (int k = 0; k < n; ++k) {
    const double y = p.xy_max * (-1.0 + (2.0 * k + 1.0) / n);
    if (std::abs(y) < 1e-9) continue;
    const double v0 = (y - A_height(mat_a(y))) / y;
    r.ann2_xi_zero_max = std::max(r.ann2_xi_zero_max, std::sqrt(std::abs(v0)));
    for (int i = 0; i < n; ++i) {
      const double th = p.theta_max * (-1.0 + 2.0 * i / (n - 1));
      const double jac = (ann2_xi(y, th + h) - ann2_xi(y, th - h)) / (2 * h);
      r.ann2_min_jacobian = std::min(r.ann2_min_jacobian, std::abs(jac));
      r.ann2_parity_max = std::max(r.ann2_parity_max, std::abs(ann2_xi(y, th) + ann2_xi(y, -th)));
    }
  }
  return r;
}

}  // namespace geoamp
