#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

namespace geoamp {

using cplx = std::complex<double>;
inline constexpr double kPi = std::numbers::pi;

// Plain 2x2 real matrix [[a, b], [c, d]].
struct Mat2 {
  double a = 1, b = 0, c = 0, d = 1;

  constexpr double det() const { return a * d - b * c; }
  constexpr double trace() const { return a + d; }
  constexpr Mat2 inverse_sl2() const { return {d, -b, -c, a}; }
  constexpr Mat2 operator-() const { return {-a, -b, -c, -d}; }
  friend constexpr Mat2 operator*(const Mat2& x, const Mat2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
            x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
  }
  friend constexpr Mat2 operator+(const Mat2& x, const Mat2& y) {
    return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d};
  }
  friend constexpr Mat2 operator-(const Mat2& x, const Mat2& y) {
    return {x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d};
  }
  friend constexpr Mat2 operator*(double s, const Mat2& x) {
    return {s * x.a, s * x.b, s * x.c, s * x.d};
  }
  double max_abs_diff(const Mat2& o) const;
};

Mat2 mat_k(double theta);
Mat2 mat_a(double y);
Mat2 mat_n(double x);

// Element of PSL(2,R). Determinant 1, sign fixed so that the first nonzero
// entry of the top row is positive.
class GroupElement {
 public:
  GroupElement() = default;
  explicit GroupElement(const Mat2& m);

  static GroupElement identity() { return GroupElement(); }
  static GroupElement k(double theta) { return GroupElement(mat_k(theta)); }
  static GroupElement a(double y) { return GroupElement(mat_a(y)); }
  static GroupElement n(double x) { return GroupElement(mat_n(x)); }

  const Mat2& matrix() const { return m_; }
  GroupElement inverse() const { return GroupElement(m_.inverse_sl2()); }
  friend GroupElement operator*(const GroupElement& x, const GroupElement& y) {
    return GroupElement(x.m_ * y.m_);
  }
  bool approx_equal(const GroupElement& o, double tol) const {
    return m_.max_abs_diff(o.m_) <= tol;
  }

 private:
  Mat2 m_{};
};

// Traceless matrix [[x1, x2], [x3, -x1]].
struct LieVector {
  double x1 = 0, x2 = 0, x3 = 0;

  double norm() const { return std::sqrt(x1 * x1 + x2 * x2 + x3 * x3); }
  Mat2 matrix() const { return {x1, x2, x3, -x1}; }
  static LieVector from_matrix(const Mat2& m) { return {0.5 * (m.a - m.d), m.b, m.c}; }
  friend LieVector operator*(double s, const LieVector& v) {
    return {s * v.x1, s * v.x2, s * v.x3};
  }
};

inline const LieVector kH{0.5, 0.0, 0.0};
inline const LieVector kXn{0.0, 1.0, 0.0};
inline const LieVector kXk{0.0, 0.5, -0.5};

Mat2 exp_lie(const LieVector& x);
// Principal logarithm on PSL(2,R); the sign with nonnegative trace is used.
// Throws OutOfChart when the trace vanishes (rotation by pi, two logarithms).
LieVector log_chart(const Mat2& m);

struct IwasawaCoords {
  double x = 0;      // N-coordinate
  double y = 0;      // A-coordinate, A(g)
  double theta = 0;  // K-angle in (-pi, pi]
};

IwasawaCoords iwasawa(const Mat2& g);
Mat2 compose(const IwasawaCoords& c);

// A(g) = log Im(g i).
inline double A_height(const Mat2& g) { return -std::log(g.c * g.c + g.d * g.d); }
double k_angle(const Mat2& g);
double wrap_angle(double t);

// sigma with k(theta) g in NA k(sigma(theta)).
double angle_map_sigma(const Mat2& g, double theta);
// d sigma / d theta, equal to exp(A(k(theta) g)).
double angle_map_sigma_derivative(const Mat2& g, double theta);
// d/dt A(g a(t)) at t = 0, equal to cos of the K-angle.
double A_derivative(const Mat2& g);
// d/du d/dt A(k(t) a(y) exp(u X_n)) at (0,0) by central differences.
double avanish_mixed_derivative(double y, double step = 1e-4);

cplx mobius(const Mat2& g, cplx z);
double hyperbolic_distance(cplx z, cplx w);
double dist_group(const Mat2& g, const Mat2& h);

// l(x) = g a(x) i for x in [0, length].
class GeodesicSegment {
 public:
  GeodesicSegment() = default;
  GeodesicSegment(GroupElement base, double length);

  const GroupElement& base() const { return base_; }
  double length() const { return length_; }
  cplx point(double x) const;
  GeodesicSegment translated(const GroupElement& h) const {
    return GeodesicSegment(h * base_, length_);
  }

 private:
  GroupElement base_{};
  double length_ = 1.0;
};

double dist_point_segment(cplx p, const GeodesicSegment& s);
double dist_geodesics(const GeodesicSegment& l1, const GeodesicSegment& l2);

inline constexpr double kAlignCeiling = 10.0;
double n_align(const GeodesicSegment& l1, const GeodesicSegment& l2);
// inf over t of ||log(a(-t) m)||, clamped at kAlignCeiling; t* reported.
double align_to_A(const Mat2& m, double* t_star = nullptr);

}  // namespace geoamp
