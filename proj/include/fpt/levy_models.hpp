#pragma once

#include <complex>
#include <string>
#include <variant>

#include <json.hpp>

namespace fpt {

using cplx = std::complex<double>;

/// Subordinator with drift b and jump measure c * exp(-a z) dz on (0, inf).
struct ExponentialSubordinator {
  double a = 1.0;  // decay rate of the jump measure
  double b = 0.0;  // drift
  double c = 1.0;  // jump intensity scale
};

/// Gamma subordinator with variance rate nu, plus optional drift b.
struct VarianceGammaSubordinator {
  double nu = 1.0;
  double b = 0.0;
};

/// Inverse Gaussian subordinator: first passage of a Brownian motion with
/// drift beta_tilde to the level gamma_tilde * t.
struct NigSubordinator {
  double beta_tilde = 1.0;
  double gamma_tilde = 1.0;
};

/// Tagged parameter set for one of the supported subordinator families.
/// Construct through the `make_*` helpers or `subordinator_from_json`; both
/// validate the parameter constraints.
using SubordinatorSpec =
    std::variant<ExponentialSubordinator, VarianceGammaSubordinator, NigSubordinator>;

SubordinatorSpec make_exponential(double a, double b, double c);
SubordinatorSpec make_variance_gamma(double nu, double b = 0.0);
SubordinatorSpec make_nig(double beta_tilde, double gamma_tilde);

/// Throws DomainError when a parameter constraint is violated.
void validate(const SubordinatorSpec& spec);

std::string family_name(const SubordinatorSpec& spec);

/// Brownian motion with drift `beta` run on the clock of `subordinator`.
struct LsbmSpec {
  double beta = 0.0;
  SubordinatorSpec subordinator = VarianceGammaSubordinator{};

  bool is_variance_gamma() const {
    return std::holds_alternative<VarianceGammaSubordinator>(subordinator);
  }
  /// Variance gamma parameters; throws UnsupportedError for other families.
  const VarianceGammaSubordinator& vg() const;
  /// sqrt(2/nu + beta^2) for the variance gamma family.
  double alpha() const;
};

LsbmSpec make_lsbm(double beta, SubordinatorSpec subordinator);

/// Laplace exponent psi(u) = -log E[exp(-u T_1)] on the principal branch.
/// Throws DomainError when u lies on the family's branch cut or pole.
cplx laplace_exponent(const SubordinatorSpec& spec, cplx u);

/// d psi / du, same domain as `laplace_exponent`.
cplx laplace_exponent_derivative(const SubordinatorSpec& spec, cplx u);

/// Real-argument fast path for u >= 0 (no branch checks needed there).
double laplace_exponent(const SubordinatorSpec& spec, double u);
double laplace_exponent_derivative(const SubordinatorSpec& spec, double u);

/// log E[exp(i u X_t)] = -t psi(u^2/2 - i u beta) for the process started at 0.
cplx x_char_exponent(const LsbmSpec& lsbm, cplx u, double t);

/// Levy density of X at y != 0. Only the exponential and variance gamma
/// families have closed forms; NIG throws UnsupportedError.
double levy_density_x(const LsbmSpec& lsbm, double y);

// JSON form: {"family": "variance_gamma", "nu": 1, "b": 0}
//            {"beta": 0.2, "subordinator": {...}}
nlohmann::json to_json(const SubordinatorSpec& spec);
SubordinatorSpec subordinator_from_json(const nlohmann::json& j);
nlohmann::json to_json(const LsbmSpec& lsbm);
LsbmSpec lsbm_from_json(const nlohmann::json& j);

}  // namespace fpt
