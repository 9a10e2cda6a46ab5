#include "fpt/levy_models.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "fpt/errors.hpp"

namespace fpt {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const char* what) {
  if (!ok) throw DomainError(what);
}

void reject_unknown_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                         const char* where) {
  if (!j.is_object()) throw UsageError(std::string(where) + ": expected a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) {
      throw UsageError(std::string(where) + ": unknown key '" + key + "'");
    }
  }
}

}  // namespace

SubordinatorSpec make_exponential(double a, double b, double c) {
  SubordinatorSpec s = ExponentialSubordinator{a, b, c};
  validate(s);
  return s;
}

SubordinatorSpec make_variance_gamma(double nu, double b) {
  SubordinatorSpec s = VarianceGammaSubordinator{nu, b};
  validate(s);
  return s;
}

SubordinatorSpec make_nig(double beta_tilde, double gamma_tilde) {
  SubordinatorSpec s = NigSubordinator{beta_tilde, gamma_tilde};
  validate(s);
  return s;
}

void validate(const SubordinatorSpec& spec) {
  std::visit(overloaded{
                 [](const ExponentialSubordinator& e) {
                   require(std::isfinite(e.a) && e.a > 0, "exponential: a must be > 0");
                   require(std::isfinite(e.b) && e.b >= 0, "exponential: b must be >= 0");
                   require(std::isfinite(e.c) && e.c > 0, "exponential: c must be > 0");
                 },
                 [](const VarianceGammaSubordinator& v) {
                   require(std::isfinite(v.nu) && v.nu > 0, "variance gamma: nu must be > 0");
                   require(std::isfinite(v.b) && v.b >= 0, "variance gamma: b must be >= 0");
                 },
                 [](const NigSubordinator& n) {
                   require(std::isfinite(n.beta_tilde) && n.beta_tilde > 0,
                           "nig: beta_tilde must be > 0");
                   require(std::isfinite(n.gamma_tilde) && n.gamma_tilde > 0,
                           "nig: gamma_tilde must be > 0");
                 },
             },
             spec);
}

std::string family_name(const SubordinatorSpec& spec) {
  return std::visit(overloaded{
                        [](const ExponentialSubordinator&) { return std::string("exponential"); },
                        [](const VarianceGammaSubordinator&) {
                          return std::string("variance_gamma");
                        },
                        [](const NigSubordinator&) { return std::string("nig"); },
                    },
                    spec);
}

const VarianceGammaSubordinator& LsbmSpec::vg() const {
  if (const auto* v = std::get_if<VarianceGammaSubordinator>(&subordinator)) return *v;
  throw UnsupportedError("operation requires a variance gamma subordinator, got " +
                         family_name(subordinator));
}

double LsbmSpec::alpha() const { return std::sqrt(2.0 / vg().nu + beta * beta); }

LsbmSpec make_lsbm(double beta, SubordinatorSpec subordinator) {
  if (!std::isfinite(beta)) throw DomainError("lsbm: beta must be finite");
  validate(subordinator);
  return LsbmSpec{beta, std::move(subordinator)};
}

cplx laplace_exponent(const SubordinatorSpec& spec, cplx u) {
  return std::visit(
      overloaded{
          [u](const ExponentialSubordinator& e) -> cplx {
            const cplx den = e.a + u;
            if (den == cplx(0.0)) throw DomainError("exponential psi: pole at u = -a");
            return e.b * u + u * e.c / den;
          },
          [u](const VarianceGammaSubordinator& v) -> cplx {
            const cplx arg = 1.0 + v.nu * u;
            if (arg.imag() == 0.0 && arg.real() <= 0.0) {
              throw DomainError("variance gamma psi: 1 + nu u on the log branch cut");
            }
            return v.b * u + std::log(arg) / v.nu;
          },
          [u](const NigSubordinator& n) -> cplx {
            const cplx arg = n.beta_tilde * n.beta_tilde + 2.0 * u;
            if (arg.imag() == 0.0 && arg.real() < 0.0) {
              throw DomainError("nig psi: beta_tilde^2 + 2u on the sqrt branch cut");
            }
            return n.gamma_tilde * (std::sqrt(arg) - n.beta_tilde);
          },
      },
      spec);
}

cplx laplace_exponent_derivative(const SubordinatorSpec& spec, cplx u) {
  return std::visit(
      overloaded{
          [u](const ExponentialSubordinator& e) -> cplx {
            const cplx den = e.a + u;
            if (den == cplx(0.0)) throw DomainError("exponential psi': pole at u = -a");
            return e.b + e.c * e.a / (den * den);
          },
          [u](const VarianceGammaSubordinator& v) -> cplx {
            const cplx arg = 1.0 + v.nu * u;
            if (arg.imag() == 0.0 && arg.real() <= 0.0) {
              throw DomainError("variance gamma psi': 1 + nu u on the log branch cut");
            }
            return v.b + 1.0 / arg;
          },
          [u](const NigSubordinator& n) -> cplx {
            const cplx arg = n.beta_tilde * n.beta_tilde + 2.0 * u;
            if (arg.imag() == 0.0 && arg.real() <= 0.0) {
              throw DomainError("nig psi': beta_tilde^2 + 2u on the sqrt branch cut");
            }
            return n.gamma_tilde / std::sqrt(arg);
          },
      },
      spec);
}

double laplace_exponent(const SubordinatorSpec& spec, double u) {
  if (!(u >= 0.0)) return laplace_exponent(spec, cplx(u)).real();
  return std::visit(
      overloaded{
          [u](const ExponentialSubordinator& e) { return e.b * u + u * e.c / (e.a + u); },
          [u](const VarianceGammaSubordinator& v) {
            return v.b * u + std::log1p(v.nu * u) / v.nu;
          },
          [u](const NigSubordinator& n) {
            // sqrt(b^2 + 2u) - b written without cancellation for small u
            const double b = n.beta_tilde;
            return n.gamma_tilde * 2.0 * u / (std::sqrt(b * b + 2.0 * u) + b);
          },
      },
      spec);
}

double laplace_exponent_derivative(const SubordinatorSpec& spec, double u) {
  if (!(u >= 0.0)) return laplace_exponent_derivative(spec, cplx(u)).real();
  return std::visit(
      overloaded{
          [u](const ExponentialSubordinator& e) {
            return e.b + e.c * e.a / ((e.a + u) * (e.a + u));
          },
          [u](const VarianceGammaSubordinator& v) { return v.b + 1.0 / (1.0 + v.nu * u); },
          [u](const NigSubordinator& n) {
            return n.gamma_tilde / std::sqrt(n.beta_tilde * n.beta_tilde + 2.0 * u);
          },
      },
      spec);
}

cplx x_char_exponent(const LsbmSpec& lsbm, cplx u, double t) {
  const cplx i(0.0, 1.0);
  const cplx arg = 0.5 * u * u - i * u * lsbm.beta;
  return -t * laplace_exponent(lsbm.subordinator, arg);
}

double levy_density_x(const LsbmSpec& lsbm, double y) {
  if (y == 0.0 || !std::isfinite(y)) throw DomainError("levy density: y must be finite and != 0");
  const double beta = lsbm.beta;
  return std::visit(
      overloaded{
          [&](const ExponentialSubordinator& e) {
            // int_0^inf c e^{-a z} N(y; beta z, z) dz
            const double r = std::sqrt(beta * beta + 2.0 * e.a);
            return e.c / r * std::exp(beta * y - r * std::abs(y));
          },
          [&](const VarianceGammaSubordinator& v) {
            const double alpha = std::sqrt(2.0 / v.nu + beta * beta);
            return std::exp(beta * y - alpha * std::abs(y)) / (v.nu * std::abs(y));
          },
          [&](const NigSubordinator&) -> double {
            throw UnsupportedError("levy density: no closed form for the nig family");
          },
      },
      lsbm.subordinator);
}

nlohmann::json to_json(const SubordinatorSpec& spec) {
  return std::visit(
      overloaded{
          [](const ExponentialSubordinator& e) {
            return nlohmann::json{{"family", "exponential"}, {"a", e.a}, {"b", e.b}, {"c", e.c}};
          },
          [](const VarianceGammaSubordinator& v) {
            return nlohmann::json{{"family", "variance_gamma"}, {"nu", v.nu}, {"b", v.b}};
          },
          [](const NigSubordinator& n) {
            return nlohmann::json{{"family", "nig"},
                                  {"beta_tilde", n.beta_tilde},
                                  {"gamma_tilde", n.gamma_tilde}};
          },
      },
      spec);
}

SubordinatorSpec subordinator_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("family")) {
    throw UsageError("subordinator: missing 'family'");
  }
  const auto family = j.at("family").get<std::string>();
  if (family == "exponential") {
    reject_unknown_keys(j, {"family", "a", "b", "c"}, "subordinator");
    return make_exponential(j.at("a").get<double>(), j.value("b", 0.0), j.at("c").get<double>());
  }
  if (family == "variance_gamma") {
    reject_unknown_keys(j, {"family", "nu", "b"}, "subordinator");
    return make_variance_gamma(j.at("nu").get<double>(), j.value("b", 0.0));
  }
  if (family == "nig") {
    reject_unknown_keys(j, {"family", "beta_tilde", "gamma_tilde"}, "subordinator");
    return make_nig(j.at("beta_tilde").get<double>(), j.at("gamma_tilde").get<double>());
  }
  throw UsageError("subordinator: unknown family '" + family + "'");
}

nlohmann::json to_json(const LsbmSpec& lsbm) {
  return nlohmann::json{{"beta", lsbm.beta}, {"subordinator", to_json(lsbm.subordinator)}};
}

LsbmSpec lsbm_from_json(const nlohmann::json& j) {
  reject_unknown_keys(j, {"beta", "subordinator"}, "model");
  return make_lsbm(j.at("beta").get<double>(), subordinator_from_json(j.at("subordinator")));
}

}  // namespace fpt
