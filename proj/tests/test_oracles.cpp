#include <doctest.h>

#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "fpt/errors.hpp"
#include "fpt/oracles.hpp"

using namespace fpt;

namespace {

const LsbmSpec kSetI = make_lsbm(0.2, make_variance_gamma(1.0));
const LsbmSpec kSetII = make_lsbm(-0.2, make_variance_gamma(2.0));

// density of X_t - X_0 at y by Fourier inversion, y != 0
double increment_density(const LsbmSpec& l, double t, double y) {
  using namespace boost::math::quadrature;
  ooura_fourier_cos<double> qc(1e-10);
  ooura_fourier_sin<double> qs(1e-10);
  auto phi = [&](double u) { return std::exp(x_char_exponent(l, u, t)); };
  const double w = std::abs(y);
  const double sign = y > 0.0 ? 1.0 : -1.0;
  const double c = qc.integrate([&](double u) { return phi(u).real(); }, w).first;
  const double s = qs.integrate([&](double u) { return phi(u).imag(); }, w).first;
  return (c + sign * s) / std::numbers::pi;
}

struct ThreadsEnv {
  explicit ThreadsEnv(const char* v) { setenv("FPT_THREADS", v, 1); }
  ~ThreadsEnv() { unsetenv("FPT_THREADS"); }
};

}  // namespace

TEST_CASE("transition row") {
  const auto sym = transition_row(make_lsbm(0.0, make_variance_gamma(1.0)), 0.1, 2000, 10.0);
  for (int j = 1; j < 2000; ++j) CHECK(std::abs(sym.p[sym.center + j] - sym.p[sym.center - j]) <= 1e-12);

  const auto row = transition_row(kSetI, 0.1, 4000, 15.0);
  double total = 0.0, mean = 0.0;
  for (int j = -4000; j < 4000; ++j) {
    total += row.p[row.center + j];
    mean += j * row.dx * row.p[row.center + j];
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(mean == doctest::Approx(0.2 * 0.1).epsilon(0.02));

  // smooth enough at dt = 2 to compare cell masses with the inverted density
  const auto wide = transition_row(kSetII, 4.0, 4000, 15.0);
  for (int j : {-800, -200, -40, 40, 200, 800}) {
    CHECK(wide.p[wide.center + j] / wide.dx ==
          doctest::Approx(increment_density(kSetII, 4.0, j * wide.dx)).epsilon(1e-3));
  }
  CHECK_THROWS_AS(transition_row(kSetI, 0.0, 100, 1.0), DomainError);
}

TEST_CASE("finite difference first passage") {
  const FdConfig cfg{200, 2000, 15.0};
  const auto r = fd_first_passage(kSetII, 0.5, 5.0, cfg);
  CHECK(r.survival.front() == 1.0);  // f0 is the indicator of x > 0
  REQUIRE(r.density.size() == 200);
  double mass = 0.0;
  const double dt = 5.0 / 200;
  for (double d : r.density) {
    CHECK(d >= 0.0);
    CHECK(d <= 1.0 / dt);
    mass += d * dt;
  }
  CHECK(mass <= 1.0 + 1e-6);
  CHECK(r.max_survival_increase <= 1e-12);
  CHECK(r.t.front() == doctest::Approx(0.5 * dt));

  // stable for coarse and lopsided discretizations
  for (auto c : {FdConfig{8, 64, 15.0}, FdConfig{500, 8, 15.0}, FdConfig{8, 4000, 5.0}}) {
    const auto q = fd_first_passage(kSetI, 0.5, 5.0, c);
    for (double d : q.density) CHECK((d >= 0.0 && d <= c.n_t / 5.0 + 1e-9));
  }
  CHECK_THROWS_AS(fd_first_passage(kSetI, 20.0, 5.0, cfg), UsageError);
  CHECK_THROWS_AS(fd_first_passage(kSetI, -0.1, 5.0, cfg), UsageError);
  CHECK_THROWS_AS(fd_first_passage(kSetI, 0.5, 5.0, FdConfig{4, 100, 1.0}), UsageError);
}

TEST_CASE("clock increments match the Laplace exponent") {
  const std::vector<SubordinatorSpec> specs = {make_variance_gamma(1.0), make_variance_gamma(2.0, 0.3),
                                               make_nig(1.5, 0.8), make_exponential(2.0, 0.1, 1.5)};
  const double dt = 0.05;
  const int n = 200000;
  for (const auto& sp : specs) {
    std::mt19937_64 rng(11);
    double lt = 0.0, m = 0.0;
    int negative = 0;
    for (int i = 0; i < n; ++i) {
      const double d = clock_increment(sp, dt, rng);
      if (d < 0.0) ++negative;
      lt += std::exp(-d);
      m += d;
    }
    CHECK(negative == 0);
    lt /= n;
    m /= n;
    // E e^{-u dT} = e^{-dt psi(u)} and E dT = dt psi'(0); the estimator sd is below 1/sqrt(n)
    CHECK(std::abs(lt - std::exp(-dt * laplace_exponent(sp, 1.0))) < 4.0 / std::sqrt(n));
    const double mean = dt * laplace_exponent_derivative(sp, 0.0);
    CHECK(m == doctest::Approx(mean).epsilon(0.03));
  }
}

TEST_CASE("monte carlo first passage") {
  McConfig c;
  c.n_paths = 2000;
  c.T = 1.0;
  const auto at_barrier = mc_first_passage(kSetI, 0.0, c);
  CHECK(at_barrier.counts[0] == 2000);
  CHECK(at_barrier.passed == 2000);

  McConfig strong;
  strong.n_paths = 100000;
  const auto fast = mc_first_passage(make_lsbm(-5.0, make_variance_gamma(1.0)), 0.1, strong);
  CHECK(static_cast<double>(fast.passed) / strong.n_paths >= 0.99);

  McConfig d;
  d.n_paths = 5000;
  d.T = 2.0;
  d.seed = 99;
  const auto a = mc_first_passage(kSetII, 0.5, d);
  const auto b = mc_first_passage(kSetII, 0.5, d);
  CHECK(mc_csv(a) == mc_csv(b));
  McResult e;
  {
    ThreadsEnv env("3");
    e = mc_first_passage(kSetII, 0.5, d);
  }
  CHECK(e.counts == a.counts);
  d.seed = 100;
  CHECK(mc_first_passage(kSetII, 0.5, d).counts != a.counts);

  double mass = 0.0;
  for (std::size_t i = 0; i < a.density.size(); ++i) mass += a.density[i] * (a.t_hi[i] - a.t_lo[i]);
  CHECK(mass == doctest::Approx(1.0 - a.survival.back()).epsilon(1e-12));
  CHECK_THROWS_AS(mc_first_passage(kSetI, 0.5, McConfig{0, 1e-3, 1, 5.0, 0.1}), UsageError);
}

TEST_CASE("monte carlo time step refinement") {
  McConfig c;
  c.n_paths = 20000;
  c.T = 2.0;
  c.bucket = 0.2;
  c.dt_sim = 2e-3;
  const auto coarse = mc_first_passage(kSetII, 0.5, c);
  c.dt_sim = 1e-3;
  c.seed = 2;
  const auto fine = mc_first_passage(kSetII, 0.5, c);
  int close = 0;
  const int n = static_cast<int>(fine.density.size());
  for (int i = 0; i < n; ++i) {
    const double se = std::hypot(coarse.density_stderr[i], fine.density_stderr[i]);
    if (std::abs(coarse.density[i] - fine.density[i]) < 2.0 * se) ++close;
  }
  CHECK(close >= 0.9 * n);
}

TEST_CASE("oracle configs round trip through json") {
  const FdConfig f{123, 456, 7.5};
  const auto f2 = fd_config_from_json(to_json(f));
  CHECK(f2.n_t == 123);
  CHECK(f2.n_x == 456);
  CHECK(f2.X == 7.5);
  McConfig m;
  m.seed = 77;
  m.n_paths = 10;
  CHECK(to_json(mc_config_from_json(to_json(m))) == to_json(m));
  CHECK_THROWS_AS(fd_config_from_json({{"n_t", 10}, {"bogus", 1}}), UsageError);
  CHECK_THROWS_AS(mc_config_from_json({{"n_paths", 0}}), UsageError);
}
