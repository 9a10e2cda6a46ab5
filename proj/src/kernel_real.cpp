#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <cmath>
#include <numbers>

#include "fpt/errors.hpp"
#include "fpt/kernel.hpp"
#include "kernel_detail.hpp"

namespace fpt {

namespace {

using boost::math::quadrature::ooura_fourier_cos;
using boost::math::quadrature::ooura_fourier_sin;

constexpr double kPi = std::numbers::pi;
constexpr double kOouraTol = 1e-8;

// The Ooura integrators cache their nodes and are not const-callable.
ooura_fourier_sin<double>& sine_transform() {
  thread_local ooura_fourier_sin<double> q(kOouraTol, 4);
  return q;
}

ooura_fourier_cos<double>& cosine_transform() {
  thread_local ooura_fourier_cos<double> q(kOouraTol, 6);
  return q;
}

struct RealIntegrand {
  const SubordinatorSpec& sub;
  double beta;
  double s;

  double psi(double k) const { return laplace_exponent(sub, 0.5 * (k * k + beta * beta)); }
  double e(double k) const { return std::exp(-s * psi(k)); }
};

}  // namespace

// p1 = -c [2 pi int_0^inf cos((x0+|x1|)k) E(k) Psi(k) dk + 2 int_0^inf cos(|x1| k) Psi(k) R(k) dk]
// with c = e^{beta(x1-x0)}/(2 pi^2), E(k) = exp(-s psi((k^2+beta^2)/2)), Psi(k) = psi(...),
// and R(k) = PV int_0^inf sin(x0 z) 2z E(z)/(z^2-k^2) dz written with E(z) - E(k) so the
// pole is removable. Within pv_excision of z = k the quotient is replaced by its limit.
KernelValue p1_generic_real(const LsbmSpec& lsbm, double x0, double s, double x1,
                            const QuadratureConfig& cfg) {
  cfg.validate();
  detail::require_positive_level(x0);
  if (lsbm.beta == 0.0) throw UnsupportedError("generic_real route needs beta != 0");
  if (!(s > 0.0)) throw DomainError("generic_real: s must be > 0");
  const RealIntegrand f{lsbm.subordinator, lsbm.beta, s};
  const double ax = std::abs(x1);
  const double eps = cfg.pv_excision;

  // Subtracting E(k) (k^2+m^2)/(z^2+m^2) instead of E(k) keeps the pole removable and
  // makes the integrand decay like E(z)/z; the difference integrates to -pi E(k) e^{-x0 m}.
  // Inside |z - k| < pv_excision the quotient is bridged linearly between the window
  // edges, which keeps the integrand continuous for the double exponential rule.
  auto residual = [&](double k) {
    const double m = std::max(k, 1.0);
    const double ek = f.e(k);
    auto quotient = [&](double z) {
      if (z == 0.0) return 0.0;
      const double phi = (k * k + m * m) / (z * z + m * m);
      return 2.0 * z * (f.e(z) - ek * phi) / ((z - k) * (z + k));
    };
    const double lo = std::max(0.0, k - eps);
    const double hi = k + eps;
    auto g = [&](double z) {
      if (z <= lo || z >= hi) return quotient(z);
      const double t = (z - lo) / (hi - lo);
      return (1.0 - t) * quotient(lo) + t * quotient(hi);
    };
    auto [r, r_err] = sine_transform().integrate(g, x0);
    return std::pair<double, double>(r - kPi * ek * std::exp(-x0 * m), r_err * std::abs(r));
  };

  const auto [t1, t1_err] =
      cosine_transform().integrate([&](double k) { return f.e(k) * f.psi(k); }, x0 + ax);

  double inner_err = 0.0;
  auto outer = [&](double k) {
    const auto [r, r_err] = residual(k);
    inner_err = std::max(inner_err, r_err);  // absolute
    return f.psi(k) * r;
  };
  double t2 = 0.0, t2_err = 0.0;
  if (ax > 0.0) {
    std::tie(t2, t2_err) = cosine_transform().integrate(outer, ax);
  } else {
    boost::math::quadrature::exp_sinh<double> q;
    double l1 = 0.0;
    t2 = q.integrate(outer, 1e-10, &t2_err, &l1);
    t2_err /= std::max(std::abs(t2), 1e-300);
  }

  const double c = -std::exp(lsbm.beta * (x1 - x0)) / (2.0 * kPi * kPi);
  const double value = c * (2.0 * kPi * t1 + 2.0 * t2);
  const double err = std::abs(c) * (2.0 * kPi * std::abs(t1) * t1_err +
                                    2.0 * (std::abs(t2) * t2_err + inner_err));
  return detail::clamp_value(value, err, "generic_real");
}

}  // namespace fpt
