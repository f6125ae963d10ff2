#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/trapezoidal.hpp>

#include "geoamp/spherical.hpp"

using namespace geoamp;

namespace {

// P_{-1/2+is}(cosh r) by the Mehler-Dirichlet integral, substituting u = r - v^2.
double mehler(double s, double r) {
  auto f = [&](double v) {
    if (v == 0) return 2 * std::cos(s * r) / std::sqrt(std::sinh(r));
    const double u = r - v * v;
    return 2 * v * std::cos(s * u) / std::sqrt(2 * std::sinh(0.5 * (r + u)) * std::sinh(0.5 * v * v));
  };
  return std::sqrt(2.0) / kPi *
         boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, std::sqrt(r), 20, 1e-14);
}

// Laplace integral (1/pi) int_0^pi (cosh r + sinh r cos t)^{-1/2 + is} dt.
cplx laplace(double s, double r) {
  auto re = [&](double t) {
    const double b = std::cosh(r) + std::sinh(r) * std::cos(t);
    return (std::pow(b, -0.5) * std::cos(s * std::log(b))) / kPi;
  };
  auto im = [&](double t) {
    const double b = std::cosh(r) + std::sinh(r) * std::cos(t);
    return (std::pow(b, -0.5) * std::sin(s * std::log(b))) / kPi;
  };
  using boost::math::quadrature::trapezoidal;
  return {trapezoidal(re, 0.0, kPi, 1e-13, 30), trapezoidal(im, 0.0, kPi, 1e-13, 30)};
}

}  // namespace

TEST_SUITE("spherical") {
  TEST_CASE("phi at the origin is 1") {
    for (double s : {0.0, 3.0, 100.0}) CHECK(std::abs(spherical_phi(s, 0.0) - 1.0) < 1e-14);
  }

  TEST_CASE("phi against the Mehler-Dirichlet oracle") {
    double worst = 0;
    for (double s : {1.0, 7.5, 30.0})
      for (double r : {0.05, 0.4, 1.1, 2.5}) worst = std::max(worst, std::abs(spherical_phi(s, r) - mehler(s, r)));
    CHECK(worst < 1e-10);
  }

  TEST_CASE("phi against the Laplace integral") {
    for (double s : {2.0, 60.0})
      for (double r : {0.3, 1.7}) CHECK(std::abs(spherical_phi(s, r) - laplace(s, r)) < 1e-10);
  }

  TEST_CASE("phi is real and even in s (property)") {
    for (double s : {0.5, 12.0, 140.0})
      for (double r : {0.2, 0.9, 2.0}) {
        const cplx v = spherical_phi(s, r);
        CHECK(std::abs(v.imag()) < 1e-12);
        CHECK(std::abs(v - spherical_phi(-s, r)) < 1e-12);
        CHECK(std::abs(v) <= 1.0 + 1e-12);
      }
  }

  TEST_CASE("two-point function reduces to the one-point function") {
    for (double r : {0.3, 1.2}) {
      const cplx a = spherical_phi_pair(15.0, Mat2{}, mat_a(r));
      CHECK(std::abs(a - spherical_phi(15.0, r)) < 1e-10);
      // Invariance under a common left translation by K.
      const cplx b = spherical_phi_pair(15.0, mat_k(0.8), mat_k(0.8) * mat_a(r));
      CHECK(std::abs(b - a) < 1e-10);
    }
  }

  TEST_CASE("window symmetry and decay") {
    const auto w = two_sided_window(400.0);
    CHECK(w.h(0.0) == doctest::Approx(w.normalization()));
    CHECK(w.h(1.0) == doctest::Approx(1.0));
    double peak = w.h_t(400.0);
    for (double s = -700; s <= 700; s += 3.7) {
      CHECK(w.h_t(s) == w.h_t(-s));
      if (std::abs(std::abs(s) - 400.0) > 200.0) CHECK(w.h_t(s) < 1e-10 * peak);
    }
    for (double u = 25.0; u < 1000; u *= 1.3) CHECK(std::pow(w.h(u), 2) <= w.envelope(u, 2) * (1 + 1e-12));
    CHECK_THROWS_AS(two_sided_window(5.0), std::invalid_argument);
    CHECK_THROWS_AS(SpectralWindow(100.0, WindowShape{0.04, 0}), std::invalid_argument);
  }

  TEST_CASE("truncation bound meets the target") {
    const auto w = two_sided_window(200.0);
    const auto tr = spectral_truncation(w, 2, 1e-10);
    CHECK(tr.tail_bound <= 1e-10);
    CHECK(tr.width > 0);
  }

  TEST_CASE("kernel is localized and its transform recovers the window") {
    const auto w = two_sided_window(60.0);
    const double k0 = synthesize_kernel(w, 2, 0.0);
    CHECK(k0 > 0);
    CHECK(std::abs(synthesize_kernel(w, 2, 1.5)) < 1e-6 * k0);
    CHECK(synthesize_kernel(w, 2, 0.4) == doctest::Approx(synthesize_kernel(w, 2, -0.4)));
    std::vector<double> xs;
    for (int i = 0; i <= 240; ++i) xs.push_back(i * 0.005);
    const auto p = kernel_profile(w, 2, xs);
    for (double s : {50.0, 60.0, 70.0})
      CHECK(harish_chandra_forward(p, s) == doctest::Approx(std::pow(w.h_t(s), 2)).epsilon(2e-3));
    CHECK_THROWS_AS(synthesize_kernel(w, 3, 0.1), std::invalid_argument);
  }

  TEST_CASE("asymptotic decomposition matches the Bessel leading term") {
    std::vector<double> ss;
    for (int i = 0; i < 12; ++i) ss.push_back(200.0 + 17.0 * i);
    for (const auto& f : asymptotic_decompose(ss, {0.3, 0.8})) {
      const cplx lead = std::sqrt(f.x / std::sinh(f.x) / (2 * kPi)) * std::exp(cplx(0, -kPi / 4));
      CHECK(std::abs(f.c1 - lead) < 0.02 * std::abs(lead));
      CHECK(std::abs(f.c2 - std::conj(f.c1)) < 1e-6);
    }
    CHECK_THROWS_AS(asymptotic_decompose({100, 200}, {0.5}), std::invalid_argument);
  }
}
