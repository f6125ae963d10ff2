#pragma once

#include <optional>
#include <string>
#include <vector>

#include "geoamp/quaternion.hpp"

namespace geoamp {

// t^{et} N^{eN} beta^{eb}, as a bound for a squared norm.
struct Monomial {
  Rational et, eN, eb;
  std::string label;
};

// c0 + cN log_t N + cb log_t beta >= 0.
struct LinearConstraint {
  Rational c0, cN, cb;
  std::string label;
};

struct ExponentModel {
  std::string name;
  std::vector<Monomial> terms;
  std::vector<LinearConstraint> constraints;
  std::optional<Rational> fixed_N;     // log_t N held fixed
  std::optional<Rational> fixed_beta;  // log_t beta held fixed
  Rational output_scale = Rational(1, 2);  // bound exponent = scale * max term exponent
  std::optional<Rational> theta;           // Ramanujan parameter of the model, if any
};

struct OptimizationResult {
  Rational N_exponent, beta_exponent;
  Rational value;           // max term exponent at the optimum
  Rational bound_exponent;  // output_scale * value
  std::vector<std::size_t> active;
};

// Minimizes max_k(et + eN n + eb b) subject to the constraints, exactly over the rationals.
// Throws UnboundedModel when the minimum is not attained in a bounded region.
OptimizationResult optimize_exponents(const ExponentModel& model);
Rational max_term_exponent(const ExponentModel& model, const Rational& n, const Rational& b);

// Presets: period-a, period-b, onspec (beta fixed), offspec (beta fixed), main.
ExponentModel preset_model(const std::string& name, const Rational& beta_exponent = 0);
// Squared-norm model of the Ramanujan-conditional amplifier at fixed beta.
ExponentModel conditional_onspec_model(const Rational& theta, const Rational& beta_exponent);
ExponentModel conditional_main_model(const Rational& theta);

// bound exponent = c0 + c1 * log_t beta over a range where the active set is constant.
struct AffineExponent {
  Rational c0, c1;
};
AffineExponent affine_in_beta(const std::string& preset, const Rational& b1 = Rational(1, 10),
                              const Rational& b2 = Rational(1, 5));

struct ConditionalExponents {
  Rational l2_exponent;     // 1 / (8 - 8 theta)
  Rational beta_exponent;   // (1 - 2 theta) / (2 - 2 theta)
  Rational period_t;        // theta / 2
  Rational period_beta;     // 1/4 - theta / 2
};
ConditionalExponents conditional_exponents(const Rational& theta);

}  // namespace geoamp
