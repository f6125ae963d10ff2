#include <doctest.h>

#include <random>

#include "geoamp/errors.hpp"
#include "geoamp/oscillatory.hpp"
#include "geoamp/phase.hpp"

using namespace geoamp;

namespace {

// Phase with A read off the upper half-plane: A(m) = log Im(m i).
double phase_oracle(double x1, double x2, double theta, const PhaseContext& c) {
  auto A = [](const Mat2& m) { return std::log(mobius(m, {0, 1}).imag()); };
  const Mat2 k = mat_k(theta);
  return c.rho() * (x1 - x2) - A(k * mat_a(x1)) + A(k * c.g() * mat_a(x2));
}

const Mat2 kTwoPoint = mat_a(0.3) * mat_k(1.8565904);

}  // namespace

TEST_SUITE("phase") {
  TEST_CASE("identity gives the zero phase on the diagonal") {
    const PhaseContext c(Mat2{}, 0.5);
    for (double th : {-2.0, 0.4, 1.9})
      for (double x : {-1.0, 0.0, 0.8}) CHECK(phase_value(x, x, th, c) == doctest::Approx(0.0));
    CHECK(reduced_psi(0.7, c) == doctest::Approx(0.0));
  }

  TEST_CASE("xi point at the identity") {
    const PhaseContext c(Mat2{}, 0.5);
    const auto p = xi_points(kPi / 2, c);
    CHECK(p.xi1 == doctest::Approx(std::log(std::tan(kPi / 6))));
    CHECK(p.xi2 == doctest::Approx(p.xi1));
    CHECK(p.eps1 == 1);
    CHECK_THROWS_AS(xi_points(0.0, c), OnSingularSet);
  }

  TEST_CASE("phase matches the half-plane oracle and is affine in rho (property)") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> U(-1, 1);
    for (int i = 0; i < 100; ++i) {
      const Mat2 g = mat_k(3 * U(rng)) * mat_a(U(rng)) * mat_n(U(rng));
      const PhaseContext c1(g, 0.3), c2(g, 0.7);
      const double x1 = U(rng), x2 = U(rng), th = 3 * U(rng);
      CHECK(phase_value(x1, x2, th, c1) == doctest::Approx(phase_oracle(x1, x2, th, c1)).epsilon(1e-12));
      CHECK(phase_value(x1, x2, th, c2) - phase_value(x1, x2, th, c1) ==
            doctest::Approx(0.4 * (x1 - x2)).epsilon(1e-10));
    }
  }

  TEST_CASE("gradient against finite differences") {
    const PhaseContext c(kTwoPoint, 0.6);
    const double h = 1e-6;
    for (double th : {-2.5, -0.7, 1.1, 2.4}) {
      const double x1 = 0.2, x2 = -0.4;
      const auto gr = phase_gradient(x1, x2, th, c);
      CHECK(gr[0] == doctest::Approx((phase_value(x1 + h, x2, th, c) - phase_value(x1 - h, x2, th, c)) / (2 * h)).epsilon(1e-6));
      CHECK(gr[1] == doctest::Approx((phase_value(x1, x2 + h, th, c) - phase_value(x1, x2 - h, th, c)) / (2 * h)).epsilon(1e-6));
      CHECK(gr[2] == doctest::Approx((phase_value(x1, x2, th + h, c) - phase_value(x1, x2, th - h, c)) / (2 * h)).epsilon(1e-6));
    }
  }

  TEST_CASE("xi points are stationary in x and psi' is the horizontal offset") {
    const PhaseContext c(kTwoPoint, 0.6);
    for (double th : {-2.2, -1.0, 0.5, 2.0}) {
      if (near_singular(th, c, 1e-3)) continue;
      const auto p = xi_points(th, c);
      const auto gr = phase_gradient(p.xi1, p.xi2, th, c);
      CHECK(std::abs(gr[0]) < 1e-12);
      CHECK(std::abs(gr[1]) < 1e-12);
      CHECK(reduced_psi_derivative(th, c) == doctest::Approx(psi_derivative_fd(th, c, 1)).epsilon(1e-7));
    }
  }

  TEST_CASE("critical points: gradient, Hessian and psi''") {
    const PhaseContext c(kTwoPoint, 0.6);
    const auto cs = find_critical_points(c);
    REQUIRE(cs.points.size() == 2);
    for (const auto& cp : cs.points) {
      for (double v : phase_gradient(cp.x1, cp.x2, cp.theta, c)) CHECK(std::abs(v) < 1e-9);
      const auto H = hessian_analytic(cp, c), N = hessian_numeric(cp, c);
      CHECK(H[0][1] == 0.0);
      CHECK(std::abs(N[0][1]) < 1e-6);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(std::abs(H[i][j] - N[i][j]) < 1e-5 * (1 + std::abs(H[i][j])));
      CHECK(det3(H) == doctest::Approx(hessian_det_formula(cp, c)).epsilon(1e-10));
      CHECK(psi_second_formula(cp) == doctest::Approx(psi_derivative_fd(cp.theta, c, 2)).epsilon(1e-5));
      CHECK(paper_det_formula(cp, c) == doctest::Approx(0.75 * hessian_det_formula(cp, c)));
    }
  }

  TEST_CASE("group in A has a continuum of critical points") {
    const PhaseContext c(mat_a(0.7), 0.5);
    CHECK(find_critical_points(c).continuum);
    CHECK(classify_degeneracy(c).cls == DegeneracyClass::D1);
    CHECK(classify_degeneracy(PhaseContext(mat_a(0.7), 0.0)).cls == DegeneracyClass::lambda0_degenerate);
    CHECK(classify_degeneracy(PhaseContext(kTwoPoint, 0.6)).cls == DegeneracyClass::nondegenerate);
  }

  TEST_CASE("D2 witnesses are degenerate critical points") {
    for (int sign : {1, -1}) {
      const double rho = 0.58, y = 0.5;
      const PhaseContext c(d2_configuration(rho, y, sign), rho);
      const auto lab = classify_degeneracy(c);
      CHECK(lab.cls == (sign > 0 ? DegeneracyClass::D2plus : DegeneracyClass::D2minus));
      REQUIRE(lab.y.has_value());
      CHECK(*lab.y == doctest::Approx(y));
      const double th = *lab.theta_witness;
      CHECK(std::abs(reduced_psi_derivative(th, c)) < 1e-9);
      CHECK(std::abs(psi_derivative_fd(th, c, 2)) < 1e-5);
      CHECK(std::abs(psi_derivative_fd(th, c, 3, 1e-3)) > 0.1);
    }
  }

  TEST_CASE("intersection data") {
    const Mat2 g = mat_a(0.4) * mat_k(0.9) * mat_a(-0.2);
    const auto ix = intersect_with_reference(g);
    REQUIRE(ix.has_value());
    CHECK(ix->y == doctest::Approx(0.4));
    CHECK(ix->angle == doctest::Approx(0.9));
    CHECK_FALSE(intersect_with_reference(ultraparallel_pair(0.5, 0.0, 0.0)).has_value());
  }

  TEST_CASE("invalid contexts and charts") {
    CHECK_THROWS(PhaseContext(Mat2{}, 0.99));
    CHECK_THROWS(PhaseContext(Mat2{}, 0.01));
    CHECK_THROWS_AS(uniformize_checks({0.6, 1.0, 21}), OutOfChart);
    CHECK_THROWS_AS(psi_derivative_fd(1.0, PhaseContext(kTwoPoint, 0.6), 4), std::invalid_argument);
  }
}
