#include "geoamp/spherical.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "geoamp/errors.hpp"
#include "geoamp/parallel.hpp"

namespace geoamp {

namespace {

constexpr double kNodeTol = 1e-13;

// Nodes of the substituted plane-wave integral for phi(a(r)):
// theta = 2 atan(e^{-r/2} tan(u/2)); stores A(k(theta) a(r)) and the weight
// dtheta/du e^{A/2} / n for a uniform u-grid.
struct PlaneWaveNodes {
  std::vector<double> A;
  std::vector<double> w;
};

PlaneWaveNodes radial_nodes(double r, int n) {
  PlaneWaveNodes out;
  out.A.resize(n);
  out.w.resize(n);
  const double lam2 = std::exp(-r);
  const double lam = std::sqrt(lam2);
  for (int j = 0; j < n; ++j) {
    const double u = -kPi + 2.0 * kPi * (j + 0.5) / n;
    const double c2 = std::cos(0.5 * u) * std::cos(0.5 * u);
    const double s2 = 1.0 - c2;
    const double D = c2 + lam2 * s2;
    // cosh r - sinh r cos(theta) in the substituted variable
    const double base = (lam2 * c2 + s2) / D;
    out.A[j] = -std::log(base);
    out.w[j] = (lam / D) * std::exp(0.5 * out.A[j]) / n;
  }
  return out;
}

cplx sum_nodes(const PlaneWaveNodes& nd, double s) {
  cplx acc = 0;
  for (std::size_t j = 0; j < nd.A.size(); ++j)
    acc += nd.w[j] * std::exp(cplx(0.0, -s * nd.A[j]));
  return acc;
}

int converged_node_count(double s, double r, cplx* value) {
  int n = plane_wave_nodes(s, r);
  cplx prev = sum_nodes(radial_nodes(r, n), s);
  while (n <= kMaxPlaneWaveNodes / 2) {
    const cplx next = sum_nodes(radial_nodes(r, 2 * n), s);
    n *= 2;
    if (std::abs(next - prev) <= kNodeTol * std::max(1.0, std::abs(next))) {
      if (value) *value = next;
      return n;
    }
    prev = next;
  }
  throw AccuracyNotReached("plane-wave quadrature for phi_s did not converge",
                           std::abs(prev));
}

}  // namespace

int plane_wave_nodes(double s, double r) {
  return 64 + 8 * static_cast<int>(std::ceil(std::abs(s) * std::abs(r)));
}

cplx spherical_phi(double s, double r) {
  r = std::abs(r);
  if (r > 10.0) throw std::invalid_argument("spherical_phi: r beyond configured range 10");
  if (r == 0.0) return 1.0;
  cplx v;
  converged_node_count(s, r, &v);
  return v;
}

cplx spherical_phi_pair(double s, const Mat2& y, const Mat2& z) {
  const double r = hyperbolic_distance(mobius(y, {0, 1}), mobius(z, {0, 1}));
  auto eval = [&](int n) {
    cplx acc = 0;
    for (int j = 0; j < n; ++j) {
      const Mat2 k = mat_k(-kPi + 2.0 * kPi * (j + 0.5) / n);
      const double Ay = A_height(k * y), Az = A_height(k * z);
      acc += std::exp(cplx(0.5 * (Ay + Az), -s * (Ay - Az)));
    }
    return acc / static_cast<double>(n);
  };
  const double spread = std::max(std::abs(iwasawa(y).y), std::abs(iwasawa(z).y));
  int n = plane_wave_nodes(s, r) + 8 * static_cast<int>(std::ceil(std::exp(spread)));
  cplx prev = eval(n);
  while (n <= kMaxPlaneWaveNodes / 2) {
    n *= 2;
    const cplx next = eval(n);
    if (std::abs(next - prev) <= kNodeTol * std::max(1.0, std::abs(next))) return next;
    prev = next;
  }
  throw AccuracyNotReached("two-point plane-wave quadrature did not converge", std::abs(prev));
}

SpectralWindow::SpectralWindow(double t, WindowShape shape) : t_(t), shape_(shape) {
  if (shape.M < 1 || !(shape.eps > 0) || shape.eps >= kPi)
    throw std::invalid_argument("window shape needs M >= 1 and 0 < eps < pi");
  const double sinc = std::sin(shape.eps) / shape.eps;
  c_ = std::pow(sinc, -2.0 * shape.M);
}

double SpectralWindow::h(double s) const {
  const double v = shape_.eps * s;
  const double sinc = (std::abs(v) < 1e-8) ? 1.0 - v * v / 6.0 : std::sin(v) / v;
  return c_ * std::pow(sinc, 2 * shape_.M);
}

double SpectralWindow::envelope(double w, int power) const {
  const double v = shape_.eps * std::abs(w);
  const double sinc_bound = v > 1.0 ? 1.0 / v : 1.0;
  return std::pow(c_ * std::pow(sinc_bound, 2 * shape_.M), power);
}

SpectralWindow two_sided_window(double t, WindowShape shape) {
  if (!(t > 10.0)) throw std::invalid_argument("two_sided_window needs t > 10");
  return SpectralWindow(t, shape);
}

Truncation spectral_truncation(const SpectralWindow& w, int power, double tail) {
  const double q = 2.0 * w.shape().M * power;
  const double scale = w.t() * std::pow(w.normalization(), power);
  auto bound = [&](double W) {
    // 2 int_W^inf env(u) (t + u) du with env(u) = env(W) (W/u)^q
    const double e = w.envelope(W, power);
    return 2.0 * e * (w.t() * W / (q - 1.0) + W * W / (q - 2.0));
  };
  double W = 1.0 / w.shape().eps;
  while (bound(W) > tail * scale) W *= 1.05;
  return {W, bound(W) / scale};
}

double synthesize_kernel(const SpectralWindow& w, int power, double x,
                         const SynthesisOptions& opt) {
  if (std::abs(x) > 2.0) throw std::invalid_argument("synthesize_kernel needs |x| <= 2");
  if (power != 1 && power != 2) throw std::invalid_argument("power must be 1 or 2");
  const auto tr = spectral_truncation(w, power, opt.tail);
  const double r = std::abs(x);
  const double s_lo = std::max(0.0, w.t() - tr.width);
  const double s_hi = w.t() + tr.width;
  const int ns = static_cast<int>(std::ceil((s_hi - s_lo) / opt.ds));
  const double ds = (s_hi - s_lo) / ns;

  PlaneWaveNodes nd;
  if (r > 0) nd = radial_nodes(r, converged_node_count(s_hi, r, nullptr));
  else nd = {{0.0}, {1.0}};
  const std::size_t nn = nd.A.size();
  std::vector<cplx> z(nn), step(nn);
  for (std::size_t j = 0; j < nn; ++j) {
    z[j] = nd.w[j] * std::exp(cplx(0.0, -s_lo * nd.A[j]));
    step[j] = std::exp(cplx(0.0, -ds * nd.A[j]));
  }
  double acc = 0;
  for (int k = 0; k <= ns; ++k) {
    const double s = s_lo + k * ds;
    double phi = 0;
    for (std::size_t j = 0; j < nn; ++j) {
      phi += z[j].real();
      z[j] *= step[j];
    }
    const double weight = (k == 0 || k == ns) ? 0.5 : 1.0;
    acc += weight * phi * std::pow(w.h_t(s), power) * s * std::tanh(kPi * s);
  }
  return acc * ds / (2.0 * kPi);
}

KernelProfile kernel_profile(const SpectralWindow& w, int power, const std::vector<double>& xs,
                             int threads, const SynthesisOptions& opt) {
  KernelProfile p{w, power, spectral_truncation(w, power, opt.tail), xs, std::vector<double>(xs.size())};
  parallel_for(xs.size(), threads, [&](std::size_t i) { p.k[i] = synthesize_kernel(w, power, xs[i], opt); });
  return p;
}

double harish_chandra_forward(const KernelProfile& p, double s) {
  const std::size_t n = p.x.size();
  if (n < 3 || (n - 1) % 2 != 0 || p.x.front() != 0.0)
    throw std::invalid_argument("forward transform needs an odd uniform grid starting at 0");
  const double h = p.x[1] - p.x[0];
  double acc = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wgt = (i == 0 || i == n - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += wgt * p.k[i] * spherical_phi(s, p.x[i]).real() * std::sinh(p.x[i]);
  }
  return 2.0 * kPi * acc * h / 3.0;
}

std::vector<AsymptoticFit> asymptotic_decompose(const std::vector<double>& s_values,
                                                const std::vector<double>& x_grid) {
  if (s_values.size() < 3) throw std::invalid_argument("asymptotic fit needs >= 3 s values");
  for (double s : s_values)
    if (s < 50) throw std::invalid_argument("asymptotic fit needs s >= 50");
  std::vector<AsymptoticFit> out;
  for (double x : x_grid) {
    if (x < 0.1 || x > 2.0) throw std::invalid_argument("asymptotic fit needs x in [0.1, 2]");
    std::vector<cplx> u1, u2, f;
    for (double s : s_values) {
      const double amp = 1.0 / std::sqrt(s * x);
      u1.push_back(amp * std::exp(cplx(0, s * x)));
      u2.push_back(amp * std::exp(cplx(0, -s * x)));
      f.push_back(spherical_phi(s, x));
    }
    cplx g11 = 0, g12 = 0, g22 = 0, r1 = 0, r2 = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      g11 += std::norm(u1[i]);
      g22 += std::norm(u2[i]);
      g12 += std::conj(u1[i]) * u2[i];
      r1 += std::conj(u1[i]) * f[i];
      r2 += std::conj(u2[i]) * f[i];
    }
    const double tr = (g11 + g22).real();
    const double det = (g11 * g22 - g12 * std::conj(g12)).real();
    const double disc = std::sqrt(std::max(0.0, tr * tr / 4 - det));
    const double lmin = tr / 2 - disc, lmax = tr / 2 + disc;
    if (!(lmin > 0) || lmax / lmin > 1e10) throw FitDegenerate("asymptotic fit is ill-conditioned");
    const cplx c1 = (g22 * r1 - g12 * r2) / det;
    const cplx c2 = (g11 * r2 - std::conj(g12) * r1) / det;
    double worst = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double sx = s_values[i] * x;
      worst = std::max(worst, std::abs(f[i] - c1 * u1[i] - c2 * u2[i]) * std::pow(sx, 1.5));
    }
    out.push_back({x, c1, c2, worst});
  }
  return out;
}

}  // namespace geoamp
