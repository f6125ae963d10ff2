#pragma once

#include <array>
#include <optional>
#include <vector>

#include "geoamp/group.hpp"

namespace geoamp {

// Phase parameters: g moves the reference geodesic, rho = lambda / s.
// rho = 0 (the lambda = 0 case) is admitted alongside rho in [delta, 1 - delta].
class PhaseContext {
 public:
  PhaseContext(const Mat2& g, double rho, double delta = 0.05);

  const Mat2& g() const { return g_; }
  double rho() const { return rho_; }
  double alpha() const { return alpha_; }
  double delta() const { return delta_; }

 private:
  Mat2 g_;
  double rho_, alpha_, delta_;
};

inline constexpr double kSingularTol = 1e-6;

// rho (x1 - x2) - A(k(theta) a(x1)) + A(k(theta) g a(x2)).
double phase_value(double x1, double x2, double theta, const PhaseContext& ctx);
std::array<double, 3> phase_gradient(double x1, double x2, double theta, const PhaseContext& ctx);

struct XiPoints {
  double xi1 = 0, xi2 = 0;
  int eps1 = 1, eps2 = 1;
  double sigma = 0;  // K-angle of k(theta) g
};

// Throws OnSingularSet when k(theta) l or k(theta) g l is within kSingularTol of vertical.
XiPoints xi_points(double theta, const PhaseContext& ctx);
bool near_singular(double theta, const PhaseContext& ctx, double tol = kSingularTol);
// The (up to four) theta in (-pi, pi] where a rotated geodesic is vertical.
std::vector<double> singular_angles(const PhaseContext& ctx);

double reduced_psi(double theta, const PhaseContext& ctx);
// Analytic d psi / d theta: the horizontal offset of the two xi-points.
double reduced_psi_derivative(double theta, const PhaseContext& ctx);
// Richardson-extrapolated central differences of psi (order 1, 2 or 3).
double psi_derivative_fd(double theta, const PhaseContext& ctx, int order, double step = 1e-4);

struct CriticalPoint {
  double x1 = 0, x2 = 0, theta = 0;
  double beta1 = 0, beta2 = 0;
  double h = 0;      // aperture
  double kappa = 0;  // d beta_1 / d theta
};

struct CriticalSet {
  std::vector<CriticalPoint> points;
  bool continuum = false;  // g in A: psi vanishes identically
};

CriticalSet find_critical_points(const PhaseContext& ctx, int panels = 1024);
// Scan restricted to the arc [lo, hi] (radians, lo < hi, hi - lo <= 2 pi).
CriticalSet find_critical_points_in(const PhaseContext& ctx, double lo, double hi, int panels);
CriticalPoint critical_point_at(double theta, const PhaseContext& ctx);

using Mat3 = std::array<std::array<double, 3>, 3>;
double det3(const Mat3& m);

// Hessian of the phase in (x1, x2, theta) at a critical point:
// [[sin^2 a, 0, k sin b1], [0, -sin^2 a, -k e^h sin b2], [., ., k^2 (1 - e^{2h}) / 2]].
Mat3 hessian_analytic(const CriticalPoint& cp, const PhaseContext& ctx);
// (1/2) k^2 sin^4 a (1 - e^{2h}), the determinant of hessian_analytic.
double hessian_det_formula(const CriticalPoint& cp, const PhaseContext& ctx);
Mat3 hessian_numeric(const CriticalPoint& cp, const PhaseContext& ctx, double step = 1e-3);
// -(1/2) k^2 (1 - e^{2h}).
double psi_second_formula(const CriticalPoint& cp);

// Published variants with (1/2) sin^2 a on the diagonal, determinant
// (3/8) k^2 sin^4 a (1 - e^{2h}) and psi'' = -(3/2) k^2 (1 - e^{2h}).
Mat3 hessian_paper_display(const CriticalPoint& cp, const PhaseContext& ctx);
double paper_det_formula(const CriticalPoint& cp, const PhaseContext& ctx);
double paper_psi_second_formula(const CriticalPoint& cp);

enum class DegeneracyClass { nondegenerate, D1, D2plus, D2minus, lambda0_degenerate };
const char* to_string(DegeneracyClass c);

struct DegeneracyLabel {
  DegeneracyClass cls = DegeneracyClass::nondegenerate;
  std::optional<double> y;              // D2: g in a(y) k(+-2 alpha) A
  std::optional<double> theta_witness;  // D2: cot(theta/2) = -+ e^y cot(alpha/2)
};

struct DegeneracyTolerance {
  double align = 1e-6;  // alignment distance for g in A
  double angle = 1e-8;  // intersection angle against +-2 alpha
};

DegeneracyLabel classify_degeneracy(const PhaseContext& ctx, const DegeneracyTolerance& tol = {});

// g = a(y) k(phi) a(y') when g l meets l; nullopt otherwise. phi in (-pi, pi].
struct IntersectionData {
  double y = 0;
  double angle = 0;
  double y2 = 0;
};
std::optional<IntersectionData> intersect_with_reference(const Mat2& g);

struct UniformizeParams {
  double theta_max = 0.1;
  double xy_max = 1.0;
  int grid = 21;
};

struct UniformizeReport {
  double ann1_min = 0;             // min |(1 - d_y A(k(theta) n(x) a(y))) / theta^2|
  double ann1_dy_max = 0;          // max |d/dy| of that quotient
  double ann2_min_jacobian = 0;    // min |d xi / d theta| of (y, theta) -> (y, xi)
  double ann2_xi_zero_max = 0;     // max |xi(y, 0)|
  double ann2_parity_max = 0;      // max |xi(y, theta) + xi(y, -theta)|
};

// Throws OutOfChart when theta_max leaves the small-angle chart (> 0.5).
UniformizeReport uniformize_checks(const UniformizeParams& p = {});
double ann1_xi(double theta, double x, double y);
double ann2_xi(double y, double theta);

}  // namespace geoamp
