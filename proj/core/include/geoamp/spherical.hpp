#pragma once

#include <vector>

#include "geoamp/group.hpp"

namespace geoamp {

// Trapezoid node count 64 + 8 ceil(s r) used for the plane-wave integral.
int plane_wave_nodes(double s, double r);
inline constexpr int kMaxPlaneWaveNodes = 1 << 20;

// phi_s(a(r)) = (1/2pi) int exp((1/2 - i s) A(k(theta) a(r))) dtheta.
cplx spherical_phi(double s, double r);
// Two-point spherical function phi_s(y i, z i) via plane waves:
// (1/2pi) int exp((1/2 - i s) A(k y) + (1/2 + i s) A(k z)) dtheta.
cplx spherical_phi_pair(double s, const Mat2& y, const Mat2& z);

struct WindowShape {
  double eps = 0.04;  // support scale
  int M = 6;          // h = c sinc(eps s)^(2M)
};

// h(s) = c (sin(eps s)/(eps s))^(2M), h_t(s) = h(s - t) + h(-s - t).
class SpectralWindow {
 public:
  SpectralWindow(double t, WindowShape shape = {});

  double t() const { return t_; }
  const WindowShape& shape() const { return shape_; }
  double normalization() const { return c_; }
  double h(double s) const;
  double h_t(double s) const { return h(s - t_) + h(-s - t_); }
  // Fourier support of h^power, equal to the radius of the kernel's support.
  double support_radius(int power) const { return 2.0 * power * shape_.M * shape_.eps; }
  // Upper bound for h(u)^power on |u| >= w.
  double envelope(double w, int power) const;

 private:
  double t_;
  WindowShape shape_;
  double c_;
};

SpectralWindow two_sided_window(double t, WindowShape shape = {});

struct SynthesisOptions {
  double ds = 0.5;     // spectral step
  double tail = 1e-10; // relative truncation target
};

// Half-width W of the spectral interval [t - W, t + W] and the tail bound it achieves.
struct Truncation {
  double width = 0;
  double tail_bound = 0;
};
Truncation spectral_truncation(const SpectralWindow& w, int power, double tail);

// k_t(a(x)) = (1/2pi) int_0^inf phi_s(a(x)) h_t(s)^power s tanh(pi s) ds.
double synthesize_kernel(const SpectralWindow& w, int power, double x,
                         const SynthesisOptions& opt = {});

struct KernelProfile {
  SpectralWindow window;
  int power = 2;
  Truncation truncation;
  std::vector<double> x;
  std::vector<double> k;
};

KernelProfile kernel_profile(const SpectralWindow& w, int power, const std::vector<double>& xs,
                             int threads = 1, const SynthesisOptions& opt = {});

// Forward transform 2pi int_0^R k(r) phi_s(a(r)) sinh r dr of a radial profile
// sampled on a uniform grid starting at 0 (Simpson).
double harish_chandra_forward(const KernelProfile& p, double s);

struct AsymptoticFit {
  double x = 0;
  cplx c1, c2;
  double scaled_residual = 0;  // max |residual| (s x)^{3/2}
};

// Least-squares fit of phi_s(a(x)) to (c1 e^{isx} + c2 e^{-isx}) (sx)^{-1/2} over s_values.
std::vector<AsymptoticFit> asymptotic_decompose(const std::vector<double>& s_values,
                                                const std::vector<double>& x_grid);

}  // namespace geoamp
