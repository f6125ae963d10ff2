#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "geoamp/group.hpp"
#include "geoamp/spherical.hpp"

namespace geoamp {

enum class BumpKind { standard_exp, poly_smooth };
BumpKind parse_bump_kind(const std::string& s);
const char* to_string(BumpKind k);

// Bump supported in [lo, hi] with peak value 1:
// poly_smooth ~ (u(1-u))^8, standard_exp ~ exp(-1/(u(1-u))), u = (x-lo)/(hi-lo).
struct BumpProfile {
  BumpKind kind = BumpKind::poly_smooth;
  double lo = 0.0, hi = 1.0;
  double operator()(double x) const;
  // Derivatives continuous through this order (-1 for C-infinity).
  int smoothness() const { return kind == BumpKind::poly_smooth ? 7 : -1; }
};

// 1 on [-inner, inner], 0 outside [-outer, outer], smooth in between.
struct PlateauCutoff {
  double inner = 1.0, outer = 2.0;
  double operator()(double x) const;
};

struct OscOptions {
  double rel_tol = 1e-6;
  int max_panels = 1 << 16;  // per dimension
};

struct OscResult {
  cplx value;
  double error_estimate = 0;
  int panels = 0;  // per dimension at acceptance
};

// int f(x) exp(i s phi(x)) dx over the box [lo_d, hi_d], d < dim, dim in {1,2,3}.
// Gauss-Legendre 16-point tensor panels of at most a quarter period of s phi,
// accepted when panel halving changes the result by < rel_tol.
using ScalarField = std::function<double(std::span<const double>)>;
OscResult osc_integrate(const ScalarField& f, const ScalarField& phi, double s,
                        std::span<const double> lo, std::span<const double> hi,
                        const OscOptions& opt = {});

struct RestrictionOptions {
  double rel_tol = 1e-6;
  int max_theta_nodes = 1 << 17;
  double x_nodes_per_period = 16.0;
};

// I(s, lambda, g) = iint e^{i lambda (x1 - x2)} b1(x1) b2(x2) phi_{-s}(a(x1) i, g a(x2) i)
// through the plane-wave representation, integrating x1, x2 inside each theta.
OscResult restriction_integral(double s, double lambda, const Mat2& g, const BumpProfile& b1,
                               const BumpProfile& b2, const RestrictionOptions& opt = {});

// Same integral for segments l1(x) = g1 a(x) i, l2(x) = g2 a(x) i.
OscResult restriction_integral(double s, double lambda, const GeodesicSegment& l1,
                               const GeodesicSegment& l2, const BumpProfile& b,
                               const RestrictionOptions& opt = {});

struct LineGeometry {
  double theta = 0;  // rotation k(theta)
  double x = 0;      // horizontal offset n(x)
  double y = 0;      // base height a(y)
};

// int b(z) exp(i lambda z - i s A(k(theta) n(x) a(y + z))) dz.
cplx window_line_integral(double s, double lambda, const LineGeometry& geo, const BumpProfile& b);
// int b(z) e^{i lambda z} phi_{-s}(n(x) a(y + z)) dz.
cplx window_spherical_line_integral(double s, double lambda, const LineGeometry& geo,
                                    const BumpProfile& b);

// Threshold C s^{-1/2 + eps} beta^{1/2} of the rapid-decay regime.
inline double decay_threshold(double s, double beta, double eps = 0.1, double C = 1.0) {
  return C * std::pow(s, -0.5 + eps) * std::sqrt(beta);
}

struct KernelRestrictionOptions {
  double ds = 0.5;
  double tail = 1e-10;
  RestrictionOptions inner{};
  int threads = 1;
};

// I(t, lambda, l1, l2) = iint b b e^{i lambda(x1 - x2)} K_t(l1(x1), l2(x2)) by spectral
// synthesis over s in [t - W, t + W] with weight h_t^2(s) s tanh(pi s) / 2pi.
// Exactly 0 when d(l1, l2) exceeds the kernel support radius.
cplx kernel_restriction_integral(double t, double lambda, const GeodesicSegment& l1,
                                 const GeodesicSegment& l2, const SpectralWindow& window,
                                 const BumpProfile& b, const KernelRestrictionOptions& opt = {});

// g with g l0 ultraparallel to l0 at distance n, common perpendicular through a(y1) i on l0
// and through g a(y2) i on g l0.
Mat2 ultraparallel_pair(double n, double y1, double y2);
// ultraparallel_pair(n, ., .) shifted so that its critical point with h > 0 at ratio rho
// sits at x1 = x2 = 1/2, the centre of the bump support.
Mat2 centred_ultraparallel(double n, double rho);
// g = a(y) k(sign 2 alpha) a(-y), alpha = arccos rho: g l0 crosses l0 at a(y) i in the D2 set.
Mat2 d2_configuration(double rho, double y, int sign);

enum class DecayModel { pure_power, power_times_sqrt };

struct DecaySeries {
  std::vector<double> s;
  std::vector<double> magnitude;
};

struct DecayFit {
  double slope = 0, intercept = 0, stderr_slope = 0, residual_rms = 0;
  std::size_t samples = 0;
};

// Least squares of log|I| (divided by (1 + s n)^{-1/2} under power_times_sqrt) on log s.
// Throws FitDegenerate for < 6 samples or a degenerate design.
DecayFit fit_decay(const DecaySeries& series, DecayModel model, double n_align = 0.0);
DecayFit loglog_fit(std::span<const double> x, std::span<const double> y);

}  // namespace geoamp
