#include "geoamp/oscillatory.hpp"

#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <stdexcept>

#include "geoamp/errors.hpp"
#include "geoamp/parallel.hpp"
#include "geoamp/phase.hpp"

namespace geoamp {

namespace {

// Full 16-point Gauss-Legendre rule on [-1, 1].
struct GL16 {
  std::array<double, 16> x{}, w{};
  GL16() {
    using G = boost::math::quadrature::gauss<double, 16>;
    const auto& a = G::abscissa();
    const auto& wt = G::weights();
    for (std::size_t i = 0; i < 8; ++i) {
      x[i] = -a[7 - i];
      w[i] = wt[7 - i];
      x[15 - i] = a[7 - i];
      w[15 - i] = wt[7 - i];
    }
  }
};

const GL16& gl16() {
  static const GL16 rule;
  return rule;
}

// Nodes and weights of `panels` equal GL16 panels on [lo, hi].
void panel_nodes(double lo, double hi, int panels, std::vector<double>& x, std::vector<double>& w) {
  const auto& g = gl16();
  x.resize(16 * static_cast<std::size_t>(panels));
  w.resize(x.size());
  const double h = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = lo + (p + 0.5) * h;
    for (int j = 0; j < 16; ++j) {
      x[16 * p + j] = mid + 0.5 * h * g.x[j];
      w[16 * p + j] = 0.5 * h * g.w[j];
    }
  }
}

double smooth_step(double v) {
  auto f = [](double u) { return u > 0 ? std::exp(-1.0 / u) : 0.0; };
  if (v <= 0) return 0;
  if (v >= 1) return 1;
  return f(v) / (f(v) + f(1.0 - v));
}

int quarter_period_panels(double length, double rate) {
  return std::max(2, static_cast<int>(std::ceil(length * rate / (0.5 * kPi))));
}

// Adaptive GL16 for a complex integrand whose local frequency is at most `rate`.
OscResult adaptive_complex_1d(const std::function<cplx(double)>& fn, double lo, double hi,
                              double rate, double tol, int max_panels) {
  auto eval = [&](int panels, double* l1) {
    std::vector<double> x, w;
    panel_nodes(lo, hi, panels, x, w);
    cplx acc = 0;
    double mass = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const cplx v = fn(x[i]);
      acc += w[i] * v;
      mass += w[i] * std::abs(v);
    }
    if (l1) *l1 = mass;
    return acc;
  };
  int n = quarter_period_panels(hi - lo, rate);
  double mass = 0;
  cplx prev = eval(n, &mass);
  while (2 * n <= max_panels) {
    n *= 2;
    const cplx next = eval(n, &mass);
    const double err = std::abs(next - prev);
    if (err <= tol * std::abs(next) + 1e-15 * mass) return {next, err, n};
    prev = next;
  }
  throw AccuracyNotReached("oscillatory 1D quadrature: panel budget exhausted",
                           std::abs(prev) > 0 ? mass / std::abs(prev) : mass);
}

}  // namespace

BumpKind parse_bump_kind(const std::string& s) {
  if (s == "standard-exp" || s == "standard_exp") return BumpKind::standard_exp;
  if (s == "poly-smooth" || s == "poly_smooth") return BumpKind::poly_smooth;
  throw ConfigInvalid("unknown bump kind '" + s + "'");
}

const char* to_string(BumpKind k) {
  return k == BumpKind::standard_exp ? "standard-exp" : "poly-smooth";
}

double BumpProfile::operator()(double x) const {
  const double u = (x - lo) / (hi - lo);
  if (u <= 0 || u >= 1) return 0;
  const double q = u * (1 - u);
  if (kind == BumpKind::poly_smooth) return std::pow(4.0 * q, 8);
  return std::exp(4.0 - 1.0 / q);
}

double PlateauCutoff::operator()(double x) const {
  return smooth_step((outer - std::abs(x)) / (outer - inner));
}

OscResult osc_integrate(const ScalarField& f, const ScalarField& phi, double s,
                        std::span<const double> lo, std::span<const double> hi,
                        const OscOptions& opt) {
  const std::size_t dim = lo.size();
  if (dim < 1 || dim > 3 || hi.size() != dim)
    throw std::invalid_argument("osc_integrate: dimension must be 1, 2 or 3");
  if (std::abs(s) > 5000) throw std::invalid_argument("osc_integrate: |s| exceeds 5000");
  for (std::size_t d = 0; d < dim; ++d)
    if (!(hi[d] > lo[d])) throw std::invalid_argument("osc_integrate: empty box");

  // Largest partial derivative of the phase on a coarse grid.
  constexpr int probe = 17;
  std::array<double, 3> grad{0, 0, 0};
  std::array<double, 3> p{};
  std::array<int, 3> idx{0, 0, 0};
  const int total = static_cast<int>(std::pow(probe, dim));
  for (int c = 0; c < total; ++c) {
    int r = c;
    for (std::size_t d = 0; d < dim; ++d) {
      idx[d] = r % probe;
      r /= probe;
      p[d] = lo[d] + (hi[d] - lo[d]) * idx[d] / (probe - 1.0);
    }
    for (std::size_t d = 0; d < dim; ++d) {
      const double h = 1e-5 * (hi[d] - lo[d]);
      auto q = p;
      q[d] += h;
      const double fp = phi({q.data(), dim});
      q[d] -= 2 * h;
      const double fm = phi({q.data(), dim});
      grad[d] = std::max(grad[d], std::abs(fp - fm) / (2 * h));
    }
  }

  std::array<int, 3> panels{};
  for (std::size_t d = 0; d < dim; ++d)
    panels[d] = quarter_period_panels(hi[d] - lo[d], std::abs(s) * grad[d]);

  auto eval = [&](const std::array<int, 3>& np) {
    std::array<std::vector<double>, 3> xs, ws;
    for (std::size_t d = 0; d < dim; ++d) panel_nodes(lo[d], hi[d], np[d], xs[d], ws[d]);
    std::array<std::size_t, 3> n{1, 1, 1};
    for (std::size_t d = 0; d < dim; ++d) n[d] = xs[d].size();
    cplx acc = 0;
    std::array<double, 3> q{};
    for (std::size_t i = 0; i < n[0]; ++i)
      for (std::size_t j = 0; j < n[1]; ++j)
        for (std::size_t k = 0; k < n[2]; ++k) {
          const std::array<std::size_t, 3> ii{i, j, k};
          double w = 1;
          for (std::size_t d = 0; d < dim; ++d) {
            q[d] = xs[d][ii[d]];
            w *= ws[d][ii[d]];
          }
          const std::span<const double> pt(q.data(), dim);
          const double amp = f(pt);
          if (amp != 0) acc += w * amp * std::exp(cplx(0, s * phi(pt)));
        }
    return acc;
  };

  cplx prev = eval(panels);
  double err = 0;
  for (;;) {
    std::array<int, 3> finer = panels;
    for (std::size_t d = 0; d < dim; ++d) finer[d] *= 2;
    if (*std::max_element(finer.begin(), finer.begin() + dim) > opt.max_panels)
      throw AccuracyNotReached("osc_integrate: panel budget exhausted",
                               std::abs(prev) > 0 ? err / std::abs(prev) : err);
    const cplx next = eval(finer);
    err = std::abs(next - prev);
    panels = finer;
    if (err <= opt.rel_tol * std::abs(next) + 1e-300) return {next, err, panels[0]};
    prev = next;
  }
}

namespace {

// Inner integrals of the factorized restriction integral at a fixed rotation angle:
// F1 = int b1 e^{i lambda x} e^{(1/2 - is) A(k a(x))}, F2 = int b2 e^{-i lambda x} e^{(1/2 + is) A(k g a(x))}.
struct InnerNodes {
  std::vector<double> w1, l1;          // weight * b1, lambda x1
  std::vector<double> ex, emx;         // e^{x1}, e^{-x1}
  std::vector<double> w2, l2;          // weight * b2, -lambda x2
  std::vector<double> p, q, r, u;      // g a(x2)
};

InnerNodes make_inner(double lambda, const Mat2& g, const BumpProfile& b1, const BumpProfile& b2,
                      int panels1, int panels2) {
  InnerNodes in;
  std::vector<double> x, w;
  panel_nodes(b1.lo, b1.hi, panels1, x, w);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double b = b1(x[i]);
    if (b == 0) continue;
    in.w1.push_back(w[i] * b);
    in.l1.push_back(lambda * x[i]);
    in.ex.push_back(std::exp(x[i]));
    in.emx.push_back(std::exp(-x[i]));
  }
  panel_nodes(b2.lo, b2.hi, panels2, x, w);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double b = b2(x[i]);
    if (b == 0) continue;
    const Mat2 m = g * mat_a(x[i]);
    in.w2.push_back(w[i] * b);
    in.l2.push_back(-lambda * x[i]);
    in.p.push_back(m.a);
    in.q.push_back(m.b);
    in.r.push_back(m.c);
    in.u.push_back(m.d);
  }
  return in;
}

// Returns F1 F2 and the product of the absolute masses |F1|_1 |F2|_1.
std::pair<cplx, double> inner_product(const InnerNodes& in, double s, double theta) {
  const double c = std::cos(0.5 * theta), sn = std::sin(0.5 * theta);
  const double c2 = c * c, s2 = sn * sn;
  cplx f1 = 0, f2 = 0;
  double m1 = 0, m2 = 0;
  for (std::size_t i = 0; i < in.w1.size(); ++i) {
    // e^{-A} = e^{-x} cos^2 + e^{x} sin^2
    const double base = in.emx[i] * c2 + in.ex[i] * s2;
    const double ph = in.l1[i] + s * std::log(base);
    const double amp = in.w1[i] / std::sqrt(base);
    f1 += amp * cplx(std::cos(ph), std::sin(ph));
    m1 += std::abs(amp);
  }
  for (std::size_t i = 0; i < in.w2.size(); ++i) {
    const double lc = c * in.r[i] - sn * in.p[i];
    const double ld = c * in.u[i] - sn * in.q[i];
    const double base = lc * lc + ld * ld;
    const double ph = in.l2[i] - s * std::log(base);
    const double amp = in.w2[i] / std::sqrt(base);
    f2 += amp * cplx(std::cos(ph), std::sin(ph));
    m2 += std::abs(amp);
  }
  return {f1 * f2, m1 * m2};
}

constexpr double kRoundoff = 1e-13;

double inner_rate(double s, double lambda) { return std::abs(lambda) + std::abs(s); }

int inner_panels(double length, double s, double lambda, double nodes_per_period) {
  const double periods = length * inner_rate(s, lambda) / (2 * kPi);
  return std::max(2, static_cast<int>(std::ceil(periods * 16.0 / nodes_per_period)) + 1);
}

}  // namespace

OscResult restriction_integral(double s, double lambda, const Mat2& g, const BumpProfile& b1,
                               const BumpProfile& b2, const RestrictionOptions& opt) {
  if (std::abs(s) > 2000) throw std::invalid_argument("restriction_integral: |s| exceeds 2000");
  int p1 = inner_panels(b1.hi - b1.lo, s, lambda, opt.x_nodes_per_period);
  int p2 = inner_panels(b2.hi - b2.lo, s, lambda, opt.x_nodes_per_period);

  // Inner x-quadrature check on a sparse set of angles against doubled panels.
  for (int attempt = 0;; ++attempt) {
    const InnerNodes a = make_inner(lambda, g, b1, b2, p1, p2);
    const InnerNodes b = make_inner(lambda, g, b1, b2, 2 * p1, 2 * p2);
    double worst = 0, scale = 0, mass = 0;
    constexpr int probes = 64;
    for (int j = 0; j < probes; ++j) {
      const double th = -kPi + 2 * kPi * (j + 0.37) / probes;
      const auto [va, ma] = inner_product(a, s, th);
      const auto [vb, mb] = inner_product(b, s, th);
      worst = std::max(worst, std::abs(va - vb));
      scale = std::max(scale, std::abs(vb));
      mass = std::max(mass, mb);
    }
    if (worst <= 0.1 * opt.rel_tol * scale + kRoundoff * mass) break;
    if (attempt == 6) throw AccuracyNotReached("restriction_integral: inner quadrature", worst / scale);
    p1 *= 2;
    p2 *= 2;
  }
  const InnerNodes in = make_inner(lambda, g, b1, b2, p1, p2);

  // Periodic trapezoid in theta; doubling reuses previous nodes.
  int n = 64 + 2 * static_cast<int>(std::ceil(std::abs(s)));
  cplx acc = 0;
  double mass = 0;
  auto add = [&](double th) {
    const auto [v, m] = inner_product(in, s, th);
    acc += v;
    mass += m;
  };
  for (int j = 0; j < n; ++j) add(-kPi + 2 * kPi * j / n);
  cplx prev = acc / static_cast<double>(n);
  while (2 * n <= opt.max_theta_nodes) {
    for (int j = 0; j < n; ++j) add(-kPi + 2 * kPi * (j + 0.5) / n);
    n *= 2;
    const cplx next = acc / static_cast<double>(n);
    const double err = std::abs(next - prev);
    if (err <= opt.rel_tol * std::abs(next) + kRoundoff * mass / n) return {next, err, p1};
    prev = next;
  }
  throw AccuracyNotReached("restriction_integral: angular node budget exhausted",
                           std::abs(prev) > 0 ? std::abs(acc / double(n) - prev) / std::abs(prev) : 1.0);
}

OscResult restriction_integral(double s, double lambda, const GeodesicSegment& l1,
                               const GeodesicSegment& l2, const BumpProfile& b,
                               const RestrictionOptions& opt) {
  const Mat2 g = l1.base().matrix().inverse_sl2() * l2.base().matrix();
  return restriction_integral(s, lambda, g, b, b, opt);
}

cplx window_line_integral(double s, double lambda, const LineGeometry& geo, const BumpProfile& b) {
  const Mat2 m = mat_k(geo.theta) * mat_n(geo.x);
  auto fn = [&](double z) {
    const double A = A_height(m * mat_a(geo.y + z));
    return b(z) * std::exp(cplx(0, lambda * z - s * A));
  };
  return adaptive_complex_1d(fn, b.lo, b.hi, inner_rate(s, lambda), 1e-9, 1 << 18).value;
}

cplx window_spherical_line_integral(double s, double lambda, const LineGeometry& geo,
                                    const BumpProfile& b) {
  // phi_{-s} through plane waves: (1/2pi) int dtheta int b(z) e^{i lambda z} e^{(1/2 - is) A(k n(x) a(y+z))} dz.
  const int panels = inner_panels(b.hi - b.lo, s, lambda, 16.0);
  std::vector<double> z, w;
  panel_nodes(b.lo, b.hi, panels, z, w);
  std::vector<double> wb, lz, p, q, r, u;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double bz = b(z[i]);
    if (bz == 0) continue;
    const Mat2 m = mat_n(geo.x) * mat_a(geo.y + z[i]);
    wb.push_back(w[i] * bz);
    lz.push_back(lambda * z[i]);
    p.push_back(m.a);
    q.push_back(m.b);
    r.push_back(m.c);
    u.push_back(m.d);
  }
  auto F = [&](double theta, double& mass) {
    const double c = std::cos(0.5 * theta), sn = std::sin(0.5 * theta);
    cplx acc = 0;
    for (std::size_t i = 0; i < wb.size(); ++i) {
      const double lc = c * r[i] - sn * p[i], ld = c * u[i] - sn * q[i];
      const double base = lc * lc + ld * ld;
      const double ph = lz[i] + s * std::log(base);
      const double amp = wb[i] / std::sqrt(base);
      acc += amp * cplx(std::cos(ph), std::sin(ph));
      mass += std::abs(amp);
    }
    return acc;
  };
  int n = 64 + 2 * static_cast<int>(std::ceil(std::abs(s)));
  cplx acc = 0;
  double mass = 0;
  for (int j = 0; j < n; ++j) acc += F(-kPi + 2 * kPi * j / n, mass);
  cplx prev = acc / static_cast<double>(n);
  while (2 * n <= (1 << 20)) {
    for (int j = 0; j < n; ++j) acc += F(-kPi + 2 * kPi * (j + 0.5) / n, mass);
    n *= 2;
    const cplx next = acc / static_cast<double>(n);
    if (std::abs(next - prev) <= 1e-9 * std::abs(next) + kRoundoff * mass / n) return next;
    prev = next;
  }
  throw AccuracyNotReached("window_spherical_line_integral: angular budget exhausted",
                           std::abs(prev));
}

Mat2 ultraparallel_pair(double n, double y1, double y2) {
  return mat_a(y1) * mat_k(0.5 * kPi) * mat_a(n) * mat_k(-0.5 * kPi) * mat_a(-y2);
}

Mat2 centred_ultraparallel(double n, double rho) {
  const PhaseContext probe(ultraparallel_pair(n, 0.5, 0.5), rho);
  const auto cs = find_critical_points(probe);
  for (const auto& cp : cs.points)
    if (cp.h > 0) return ultraparallel_pair(n, 1.0 - cp.x1, 1.0 - cp.x2);
  throw std::invalid_argument("centred_ultraparallel: no critical point with positive aperture");
}

Mat2 d2_configuration(double rho, double y, int sign) {
  if (!(rho > 0 && rho < 1)) throw std::invalid_argument("d2_configuration needs 0 < rho < 1");
  return mat_a(y) * mat_k((sign >= 0 ? 2.0 : -2.0) * std::acos(rho)) * mat_a(-y);
}

cplx kernel_restriction_integral(double t, double lambda, const GeodesicSegment& l1,
                                 const GeodesicSegment& l2, const SpectralWindow& window,
                                 const BumpProfile& b, const KernelRestrictionOptions& opt) {
  constexpr int power = 2;
  if (dist_geodesics(l1, l2) > window.support_radius(power)) return 0.0;
  const auto tr = spectral_truncation(window, power, opt.tail);
  const double s_lo = std::max(0.0, t - tr.width);
  const double s_hi = t + tr.width;
  const int ns = std::max(2, static_cast<int>(std::ceil((s_hi - s_lo) / opt.ds)));
  const double ds = (s_hi - s_lo) / ns;
  std::vector<cplx> terms(ns + 1);
  parallel_for(terms.size(), opt.threads, [&](std::size_t k) {
    const double s = s_lo + k * ds;
    const double wgt = (k == 0 || k == static_cast<std::size_t>(ns)) ? 0.5 : 1.0;
    const double h = window.h_t(s);
    const double density = wgt * h * h * s * std::tanh(kPi * s);
    if (density == 0) return;
    terms[k] = density * restriction_integral(s, lambda, l1, l2, b, opt.inner).value;
  });
  cplx acc = 0;
  for (const cplx& v : terms) acc += v;
  return acc * ds / (2.0 * kPi);
}

}  // namespace geoamp
