#include "fpt/specfun.hpp"

#include <cmath>
#include <numbers>

#include "fpt/errors.hpp"

namespace fpt::specfun {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
constexpr double kPi = std::numbers::pi;

// Regions for E1(z):
//   series      |z| <= 1.5, or near the negative real axis where the terms
//               do not cancel (|z| + Re z <= 8) and |z| <= 50
//   asymptotic  near the negative real axis with |z| > 50
//   continued fraction everywhere else
constexpr double kSeriesRadius = 1.5;
constexpr double kCancellationBudget = 8.0;
constexpr double kAsymptoticRadius = 50.0;

// Points exactly on the cut are taken from above.
cplx onto_upper_side(cplx z) {
  if (z.imag() == 0.0) return {z.real(), 0.0};
  return z;
}

cplx e1_series(cplx z, const Accuracy& acc) {
  // E1(z) = -gamma - log z - sum_{k>=1} (-z)^k / (k k!)
  cplx term = 1.0;
  cplx sum = 0.0;
  for (int k = 1; k <= acc.max_terms; ++k) {
    term *= -z / double(k);
    const cplx add = term / double(k);
    sum += add;
    if (std::abs(add) <= 1e-17 * std::abs(sum)) {
      return -kEulerGamma - std::log(z) - sum;
    }
  }
  throw AccuracyError("expint_e1: power series did not converge", std::abs(term));
}

cplx e1_scaled_asymptotic(cplx z, const Accuracy& acc) {
  // e^z E1(z) ~ (1/z) sum_k (-1)^k k! / z^k, truncated at the smallest term
  cplx term = 1.0;
  cplx sum = 1.0;
  double prev = 1.0;
  for (int k = 1; k <= acc.max_terms; ++k) {
    term *= -double(k) / z;
    const double mag = std::abs(term);
    if (mag > prev) break;
    sum += term;
    prev = mag;
    if (mag <= 1e-17 * std::abs(sum)) break;
  }
  if (prev > acc.rel_tol * std::abs(sum)) {
    throw AccuracyError("expint_e1: asymptotic series too short", prev);
  }
  return sum / z;
}

cplx e1_scaled_continued_fraction(cplx z, const Accuracy& acc) {
  // e^z E1(z) = 1/(z+1- 1/(z+3- 4/(z+5- ...))), modified Lentz
  constexpr double tiny = 1e-300;
  cplx b = z + 1.0;
  cplx f = b;
  cplx c = f;
  cplx d = 0.0;
  for (int i = 1; i <= acc.max_terms; ++i) {
    const double a = -double(i) * double(i);
    b += 2.0;
    d = b + a * d;
    if (d == cplx(0.0)) d = tiny;
    c = b + a / c;
    if (c == cplx(0.0)) c = tiny;
    d = 1.0 / d;
    const cplx delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) <= 1e-16) return 1.0 / f;
  }
  throw AccuracyError("expint_e1: continued fraction did not converge", std::abs(f));
}

enum class E1Method { kSeries, kAsymptotic, kContinuedFraction };

E1Method pick_method(cplx z) {
  const double r = std::abs(z);
  if (r <= kSeriesRadius) return E1Method::kSeries;
  if (r + z.real() <= kCancellationBudget) {
    return r <= kAsymptoticRadius ? E1Method::kSeries : E1Method::kAsymptotic;
  }
  return E1Method::kContinuedFraction;
}

}  // namespace

void Accuracy::validate() const {
  if (!(rel_tol > 0.0 && rel_tol <= 1e-4)) throw DomainError("Accuracy: rel_tol must be in (0, 1e-4]");
  if (max_terms < 50) throw DomainError("Accuracy: max_terms must be >= 50");
}

cplx expint_e1(cplx z, const Accuracy& acc) {
  if (z == cplx(0.0)) throw DomainError("expint_e1: logarithmic singularity at 0");
  z = onto_upper_side(z);
  switch (pick_method(z)) {
    case E1Method::kSeries:
      return e1_series(z, acc);
    case E1Method::kAsymptotic:
      return std::exp(-z) * e1_scaled_asymptotic(z, acc);
    case E1Method::kContinuedFraction:
      return std::exp(-z) * e1_scaled_continued_fraction(z, acc);
  }
  return {};
}

cplx expint_e1_scaled(cplx z, const Accuracy& acc) {
  if (z == cplx(0.0)) throw DomainError("expint_e1_scaled: logarithmic singularity at 0");
  z = onto_upper_side(z);
  switch (pick_method(z)) {
    case E1Method::kSeries:
      return std::exp(z) * e1_series(z, acc);
    case E1Method::kAsymptotic:
      return e1_scaled_asymptotic(z, acc);
    case E1Method::kContinuedFraction:
      return e1_scaled_continued_fraction(z, acc);
  }
  return {};
}

cplx expint_ei(cplx w, const Accuracy& acc) {
  if (w == cplx(0.0)) throw DomainError("expint_ei: logarithmic singularity at 0");
  if (w.imag() == 0.0) {
    // E1(-x + i0) = -Ei(x) - i pi for x > 0; E1 is real on the positive axis.
    return {-expint_e1(cplx(-w.real(), 0.0), acc).real(), 0.0};
  }
  const double side = w.imag() > 0.0 ? 1.0 : -1.0;
  return -expint_e1(-w, acc) + cplx(0.0, side * kPi);
}

double gamma_fn(double x) {
  if (!(x > 0.0)) throw DomainError("gamma_fn: x must be > 0");
  return std::tgamma(x);
}

double bessel_k(double order, double x) {
  if (!(x > 0.0)) throw DomainError("bessel_k: x must be > 0");
  order = std::abs(order);
  if (order > 200.0) throw DomainError("bessel_k: |order| must be <= 200");

  const double n = order - 0.5;
  if (n == std::round(n)) {
    // K_{1/2}(x) = sqrt(pi/(2x)) e^{-x}; K_{v+1} = K_{v-1} + (2v/x) K_v
    double k_prev = std::sqrt(kPi / (2.0 * x)) * std::exp(-x);
    if (n == 0.0) return k_prev;
    double k_cur = k_prev * (1.0 + 1.0 / x);
    for (double v = 1.5; v < order; v += 1.0) {
      const double k_next = k_prev + (2.0 * v / x) * k_cur;
      k_prev = k_cur;
      k_cur = k_next;
    }
    return k_cur;
  }
  return std::cyl_bessel_k(order, x);
}

}  // namespace fpt::specfun
