#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace chebshock {

enum class factor_family { trigonometric, polynomial, exponential };

inline std::string to_string(factor_family f) {
  switch (f) {
    case factor_family::trigonometric: return "trig";
    case factor_family::polynomial: return "poly";
    case factor_family::exponential: return "exp";
  }
  return "?";
}

inline factor_family parse_family(const std::string& s) {
  if (s == "trig") return factor_family::trigonometric;
  if (s == "poly") return factor_family::polynomial;
  if (s == "exp") return factor_family::exponential;
  throw std::invalid_argument("unknown concentration factor family '" + s + "'");
}

namespace detail {

template <class F>
double simpson(F f, double a, double b, int n = 4000) {
  double h = (b - a) / n, s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4 : 2);
  return s * h / 3;
}

// Si(pi) = int_0^pi sin(t)/t dt
inline double sine_integral_pi() {
  static const double v = simpson(
      [](double t) { return t == 0 ? 1.0 : std::sin(t) / t; }, 0.0, std::numbers::pi);
  return v;
}

inline double sinc(double eta) {
  if (eta == 0) return 1.0;
  double z = std::numbers::pi * eta;
  return std::sin(z) / z;
}

}  // namespace detail

/// mu(eta) on (0,1]; shape() is the textbook form, operator() the calibrated one.
struct concentration_factor {
  factor_family family = factor_family::trigonometric;
  int lanczos_order = 0;
  int poly_order = 1;
  double scale = 1.0;

  double shape(double eta) const {
    if (eta <= 0.0) return 0.0;
    const double pi = std::numbers::pi;
    double mu = 0.0;
    switch (family) {
      case factor_family::trigonometric:
        mu = pi * std::sin(pi * eta) / detail::sine_integral_pi();
        break;
      case factor_family::polynomial:
        mu = poly_order * pi * std::pow(eta, poly_order);
        break;
      case factor_family::exponential:
        mu = eta >= 1.0 ? 0.0 : eta * std::exp(1.0 / (6.0 * eta * (eta - 1.0)));
        break;
    }
    return mu * std::pow(detail::sinc(eta), lanczos_order);
  }

  double operator()(double eta) const { return scale * shape(eta); }

  std::string name() const { return to_string(family) + std::to_string(lanczos_order); }
};

// The interpolant at CGL nodes weights mode k of a unit step by
// (pi eta/2)/sin(pi eta/2) relative to the projection; dividing by the
// matching integral makes each factor read a unit jump as 1.
inline double calibration_scale(const concentration_factor& f) {
  const double h = std::numbers::pi / 2;
  double I = detail::simpson(
      [&](double eta) { return eta == 0 ? 0.0 : f.shape(eta) * (h * eta) / std::sin(h * eta); },
      0.0, 1.0);
  return 1.0 / I;
}

inline concentration_factor make_factor(factor_family fam, int lanczos, int poly_order = 1) {
  if (lanczos < 0 || lanczos > 3)
    throw std::invalid_argument("Lanczos order must be 0..3");
  if (poly_order < 1)
    throw std::invalid_argument("polynomial factor order must be >= 1");
  concentration_factor f{fam, lanczos, poly_order, 1.0};
  f.scale = calibration_scale(f);
  return f;
}

/// Families x Lanczos orders 0..3.
inline std::vector<concentration_factor> build_concentration_factors(
    const std::vector<factor_family>& families = {factor_family::trigonometric,
                                                  factor_family::polynomial,
                                                  factor_family::exponential},
    int poly_order = 1) {
  std::vector<concentration_factor> out;
  for (auto fam : families)
    for (int l = 0; l <= 3; ++l) out.push_back(make_factor(fam, l, poly_order));
  return out;
}

}  // namespace chebshock
