#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>

#include "fpt/errors.hpp"
#include "fpt/kernel.hpp"
#include "fpt/specfun.hpp"
#include "kernel_detail.hpp"

namespace fpt {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEulerGamma = 0.57721566490153286;
constexpr double kQuadTol = 1e-12;

// log Gamma(a) - log Gamma(b) without overflow for large arguments
double log_gamma_ratio(double a, double b) {
  if (a < 150.0 && b < 150.0) return std::log(specfun::gamma_fn(a) / specfun::gamma_fn(b));
  return std::lgamma(a) - std::lgamma(b);
}

// u^nu K_nu(alpha u) with nu = r - 1/2. Near u = 0 the Bessel function is replaced by
// its small-argument form so that huge and tiny factors are never multiplied.
struct BesselWeight {
  double nu;
  double alpha;

  double operator()(double u) const {
    const double x = alpha * u;
    if (x > 700.0) return 0.0;
    if (x < 1e-6) {
      const double a = std::abs(nu);
      if (a == 0.0) return -std::log(x / 2.0) - kEulerGamma;
      if (a < 1.0) {
        const double k = 0.5 * (std::tgamma(a) * std::pow(x / 2.0, -a) +
                                std::tgamma(-a) * std::pow(x / 2.0, a));
        return std::pow(u, nu) * k;
      }
      // u^nu (alpha u)^{-|nu|} Gamma(|nu|) 2^{|nu|-1}; nu >= 1 here so the powers cancel
      return std::tgamma(a) * std::pow(2.0, a - 1.0) * std::pow(alpha, -a) * std::pow(u, nu - a);
    }
    return std::pow(u, nu) * specfun::bessel_k(nu, x);
  }
};

}  // namespace

// p1 = e^{beta(x1-x0) - alpha d} (nu alpha^2/2)^{-r} Gamma(r+1/2) / (sqrt(pi) nu d Gamma(r+1))
//    + sqrt(2 alpha^3/pi) e^{beta(x1-x0) - alpha|x1|} (alpha nu)^{-r-1} / Gamma(r)
//      * int_0^inf u^{r-1/2} K_{r-1/2}(alpha u) f(u) du
// with r = s/nu, d = x0 + |x1| and
// f(u) = e^{-alpha(u+x0)}/(u+d) - sign(u-x0) e^{-alpha|u-x0|}/(|u-x0|+|x1|) - 2 e^{-alpha(u+x0)}/d.
KernelValue p1_vg_plancherel(const LsbmSpec& lsbm, double x0, double s, double x1,
                             const QuadratureConfig& cfg) {
  cfg.validate();
  detail::require_vg_without_drift(lsbm);
  if (!(s >= 0.0)) throw DomainError("plancherel: s must be >= 0");
  if (!(x0 >= 0.0)) throw DomainError("plancherel: x0 must be >= 0");
  const double ax = std::abs(x1);
  const double d = x0 + ax;
  if (!(d > 0.0)) throw DomainError("plancherel: x0 + |x1| must be > 0");

  const double nu = lsbm.vg().nu;
  const double alpha = lsbm.alpha();
  const double beta = lsbm.beta;
  const double r = s / nu;

  const double lead = std::exp(beta * (x1 - x0) - alpha * d - r * std::log(nu * alpha * alpha / 2.0) +
                               log_gamma_ratio(r + 0.5, r + 1.0)) /
                      (std::sqrt(kPi) * nu * d);
  if (s == 0.0) return KernelValue{lead, 0.0, lead};

  const BesselWeight k{r - 0.5, alpha};
  const double e0 = std::exp(-alpha * x0);
  auto smooth = [&](double u) { return std::exp(-alpha * (u + x0)) * (1.0 / (u + d) - 2.0 / d); };
  auto f = [&](double u) {
    return smooth(u) - std::exp(-alpha * (u - x0)) / (u - x0 + ax);
  };
  // f on [0, x0/2] without the cancellation between its three terms
  auto f_near_zero = [&](double u) {
    return e0 * (2.0 * u * u * std::exp(-alpha * u) / (d * (d - u) * (d + u)) +
                 2.0 * std::sinh(alpha * u) / (d - u));
  };
  // u = x0 -+ v, pairing the two sides of the pole at u = x0 when x1 = 0
  auto paired = [&](double v) {
    const double lo = x0 - v;
    const double hi = x0 + v;
    const double klo = k(lo);
    const double khi = k(hi);
    return klo * smooth(lo) + khi * smooth(hi) + std::exp(-alpha * v) / (v + ax) * (klo - khi);
  };

  double integral = 0.0, err = 0.0;
  if (x0 > 0.0) {
    boost::math::quadrature::tanh_sinh<double> ts;
    double e = 0.0, l1 = 0.0;
    integral += ts.integrate([&](double u) { return k(u) * f_near_zero(u); }, 0.0, 0.5 * x0,
                             kQuadTol, &e, &l1);
    err += e;
    integral += ts.integrate(paired, 0.0, 0.5 * x0, kQuadTol, &e, &l1);
    err += e;
  }
  boost::math::quadrature::exp_sinh<double> es;
  double e = 0.0, l1 = 0.0;
  const double start = x0 > 0.0 ? 1.5 * x0 : 0.0;
  integral += es.integrate([&](double u) { return k(u) * f(u); }, start,
                           std::numeric_limits<double>::infinity(), kQuadTol, &e, &l1);
  err += e;

  const double scale = std::sqrt(2.0 * alpha * alpha * alpha / kPi) *
                       std::exp(beta * (x1 - x0) - alpha * ax - (r + 1.0) * std::log(alpha * nu) -
                                std::lgamma(r));
  const double value = lead + scale * integral;
  return detail::clamp_value(value, std::abs(scale) * err + 1e-15 * std::abs(lead), "plancherel");
}

}  // namespace fpt
