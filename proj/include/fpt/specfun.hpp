#pragma once

#include <complex>

namespace fpt::specfun {

using cplx = std::complex<double>;

/// Series / continued-fraction stopping controls.
struct Accuracy {
  double rel_tol = 1e-10;
  int max_terms = 5000;

  /// Throws DomainError unless rel_tol is in (0, 1e-4] and max_terms >= 50.
  void validate() const;
};

/// Exponential integral E1(z) = int_z^inf e^{-t}/t dt, principal branch with
/// the cut along the negative real axis. On the cut the value from above
/// (Im z = +0) is returned.
cplx expint_e1(cplx z, const Accuracy& acc = {});

/// exp(z) * E1(z). Finite for |z| large in every direction, which is what
/// the variance gamma kernel needs when the two factors over/underflow
/// separately.
cplx expint_e1_scaled(cplx z, const Accuracy& acc = {});

/// Ei(w). For real x this is the principal value PV int_{-inf}^x e^t/t dt;
/// off the real axis Ei(w) = -E1(-w) + i pi sign(Im w), which is continuous
/// onto the positive real axis and has its cut along the negative one.
/// Throws DomainError at w = 0.
cplx expint_ei(cplx w, const Accuracy& acc = {});

/// Gamma function for x > 0.
double gamma_fn(double x);

/// Modified Bessel function of the second kind K_order(x) for x > 0 and
/// |order| <= 200. Half-integer orders use the closed form plus recurrence.
double bessel_k(double order, double x);

}  // namespace fpt::specfun
