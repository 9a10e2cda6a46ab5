#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include "fpt/errors.hpp"
#include "fpt/fft.hpp"
#include "fpt/iteration.hpp"
#include "fpt/oracles.hpp"

using namespace fpt;

namespace {

const LsbmSpec kSetI = make_lsbm(0.2, make_variance_gamma(1.0));
const LsbmSpec kSetII = make_lsbm(-0.2, make_variance_gamma(2.0));

struct Built {
  SpaceTimeGrid grid;
  KernelTable table;
};

Built build(const LsbmSpec& l, int nt, int nx, std::vector<double> sources = {0.5}, double T = 5.0) {
  Built b{make_grid(T, nt, nx, 10.0), {}};
  TableOptions o;
  o.sources = std::move(sources);
  b.table = build_kernel_table(l, b.grid, {}, o);
  return b;
}

// fine FD density averaged onto n coarse cells
std::vector<double> fd_cells(const FdResult& r, int n) {
  std::vector<double> c(n, 0.0);
  const int per = static_cast<int>(r.density.size()) / n;
  for (std::size_t i = 0; i < r.density.size(); ++i) c[i / per] += r.density[i] / per;
  return c;
}

struct ThreadsEnv {
  explicit ThreadsEnv(const char* v) { setenv("FPT_THREADS", v, 1); }
  ~ThreadsEnv() { unsetenv("FPT_THREADS"); }
};

}  // namespace

TEST_CASE("grid layout") {
  for (auto law : {GridLaw::kLinear, GridLaw::kQuadratic}) {
    const auto g = make_grid(5.0, 50, 10, 10.0, law);
    CHECK(g.dt == doctest::Approx(0.1));
    double sum = 0.0;
    for (int k = 0; k < g.n_x(); ++k) {
      CHECK(g.cell_weights[k] > 0.0);
      sum += g.cell_weights[k];
      if (k > 0) CHECK(g.x_nodes[k] > g.x_nodes[k - 1]);
      CHECK(g.x_neg_nodes[g.n_x() - 1 - k] == -g.x_nodes[k]);
    }
    CHECK(sum == doctest::Approx(10.0).epsilon(1e-14));
  }
  const auto q = make_grid(1.0, 4, 10, 10.0);
  CHECK(q.x_edges[1] == doctest::Approx(0.1));
  CHECK(q.x_nodes[0] == doctest::Approx(0.05));
  CHECK_THROWS_AS(make_grid(0.0, 4, 4, 1.0), UsageError);
  CHECK_THROWS_AS(make_grid(1.0, 0, 4, 1.0), UsageError);
  CHECK_THROWS_AS(grid_law_from_string("cubic"), UsageError);
}

TEST_CASE("fft convolution matches the direct sum") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int n : {1, 7, 64, 100}) {
    std::vector<double> a(n), b(n);
    for (int i = 0; i < n; ++i) {
      a[i] = u(rng);
      b[i] = u(rng);
    }
    const auto f = causal_convolve_fft(a, b);
    const auto d = causal_convolve_direct(a, b);
    for (int i = 0; i < n; ++i) CHECK(std::abs(f[i] - d[i]) <= 1e-10);
  }
  // causality: an impulse at m leaves earlier outputs untouched
  std::vector<double> a(64, 0.0), b(64, 1.0);
  a[20] = 1.0;
  const auto c = causal_convolve_fft(a, b);
  for (int i = 0; i < 20; ++i) CHECK(std::abs(c[i]) <= 1e-12);
  for (int i = 20; i < 64; ++i) CHECK(c[i] == doctest::Approx(1.0));
  CHECK(fft_size(97) == 100);
  CHECK(fft_size(128) == 128);
}

TEST_CASE("l1 distance") {
  const auto g = make_grid(5.0, 50, 4, 1.0);
  const std::vector<double> zero(50, 0.0), one(50, 1.0);
  CHECK(l1_distance(one, one, g) == 0.0);
  CHECK(l1_distance(zero, one, g) == doctest::Approx(5.0));
  CHECK_THROWS_AS(l1_distance(zero, std::vector<double>(49, 0.0), g), UsageError);
}

TEST_CASE("kernel table entries are cell averages of the kernel") {
  const auto b = build(kSetI, 50, 10);
  for (double v : b.table.P1) CHECK(v >= 0.0);
  const int r = b.table.row_of(0.5);
  // independent adaptive cell average over (s, x)
  using boost::math::quadrature::gauss_kronrod;
  for (auto [j, k] : std::vector<std::pair<int, int>>{{0, 9}, {3, 10}, {20, 7}, {49, 12}}) {
    const double s0 = j * b.grid.dt;
    const bool neg = k < 10;
    const double lo = neg ? -b.grid.x_edges[10 - k] : b.grid.x_edges[k - 10];
    const double hi = neg ? -b.grid.x_edges[9 - k] : b.grid.x_edges[k - 9];
    const double avg = gauss_kronrod<double, 15>::integrate(
                           [&](double s) {
                             return gauss_kronrod<double, 15>::integrate(
                                 [&](double x) { return p1_vg(kSetI, 0.5, s, x).value; }, lo, hi, 5, 1e-9);
                           },
                           s0, s0 + b.grid.dt, 5, 1e-9) /
                       ((hi - lo) * b.grid.dt);
    CHECK(b.table.p1(r, j, k) == doctest::Approx(avg).epsilon(2e-3));
  }
  CHECK_THROWS_AS(b.table.row_of(0.4), UsageError);
}

TEST_CASE("degenerate single time slice") {
  const auto b = build(kSetII, 1, 6, {0.5}, 0.5);
  CHECK(b.table.Q1.size() == 7);
  const auto s = iterate(b.table, b.table.row_of(0.5), 1);
  REQUIRE(s.marginals.size() == 1);
  CHECK(s.marginals[0][0] == b.table.q1(b.table.row_of(0.5), 0));
}

TEST_CASE("doubling the truncation cap leaves the table unchanged") {
  const auto g = make_grid(2.0, 10, 6, 10.0);
  QuadratureConfig wide;
  wide.truncation = 2e12;
  TableOptions o;
  o.gauss_t = 1;
  o.gauss_x = 1;
  const auto a = build_kernel_table(kSetI, g, {}, o);
  const auto c = build_kernel_table(kSetI, g, wide, o);
  for (std::size_t i = 0; i < a.P1.size(); ++i) CHECK(std::abs(a.P1[i] - c.P1[i]) <= 1e-6);
}

TEST_CASE("first iterate is the kernel marginal") {
  const auto b = build(kSetI, 20, 8);
  const int r = b.table.row_of(0.5);
  const auto s = iterate(b.table, r, 1);
  for (int j = 0; j < 20; ++j) CHECK(s.marginals[0][j] == b.table.q1(r, j));
  CHECK(s.l1_steps.empty());
  CHECK_THROWS_AS(iterate(b.table, r, 0), UsageError);
  CHECK_THROWS_AS(iterate(b.table, r, 65), UsageError);
}

TEST_CASE("second iterate against a direct double sum") {
  const auto b = build(kSetII, 16, 5);
  const auto& t = b.table;
  const auto& g = b.grid;
  const int r = t.row_of(0.5);
  const auto s = iterate(t, r, 2);
  // piecewise constant kernels in time: the convolution of cells m and n - m - {0,1}
  // averaged over cell n gives dt/2 each
  for (int n = 0; n < g.n_t; ++n) {
    double m2 = s.marginals[0][n];
    for (int k = 0; k < 5; ++k) {
      for (int xk = 0; xk < 5; ++xk) {
        double conv = 0.0;
        for (int m = 0; m <= n; ++m) {
          conv += t.p1(r, m, 5 + k) * t.p1(k, n - m, xk);
          if (n - m - 1 >= 0) conv += t.p1(r, m, 5 + k) * t.p1(k, n - m - 1, xk);
        }
        m2 += t.cell_width(xk) * g.cell_weights[k] * 0.5 * g.dt * conv;
      }
    }
    CHECK(std::abs(s.marginals[1][n] - m2) <= 1e-10);
  }
}

TEST_CASE("convergence and contraction") {
  const auto one = build(kSetI, 50, 10);
  const auto two = build(kSetII, 50, 10);
  const double c1 = contraction_estimate(one.table);
  const double c2 = contraction_estimate(two.table);
  CHECK(c1 < 1.0);
  CHECK(c2 < 0.5);

  for (const auto* b : {&one, &two}) {
    const auto s = iterate(b->table, b->table.row_of(0.5), 8);
    CHECK(s.c_hat == contraction_estimate(b->table));
    double prev = 0.0;
    for (const auto& m : s.marginals) {
      const double mass = absorbed_mass(m, b->grid);
      CHECK(mass >= prev - 1e-12);
      CHECK(mass <= 1.0 + 1e-3);
      prev = mass;
    }
    for (std::size_t i = 1; i < s.l1_steps.size(); ++i) {
      CHECK(s.l1_steps[i] <= (s.c_hat + 0.05) * s.l1_steps[i - 1]);
    }
  }

  const auto s2 = iterate(two.table, two.table.row_of(0.5), 7);
  for (std::size_t i = 1; i < s2.l1_steps.size(); ++i) CHECK(s2.l1_steps[i] / s2.l1_steps[i - 1] < 0.5);
  // step 5 -> 6 sits at the contraction rate of about 1/3 and lands near 1.7e-3;
  // the next one is below 1e-3
  CHECK(s2.l1_steps[4] < 3e-3);
  CHECK(s2.l1_steps[5] < 1e-3);

  // a row started far from the barrier puts little mass above it within the horizon
  const auto far = build(kSetI, 25, 10, {5.0});
  CHECK(positive_mass(far.table, far.table.row_of(5.0)) < 0.5);
}

TEST_CASE("early stop on tolerance") {
  const auto b = build(kSetII, 20, 8);
  const auto s = iterate(b.table, b.table.row_of(0.5), 30, 1e-4);
  CHECK(s.converged);
  CHECK(s.l1_steps.back() < 1e-4);
  CHECK(s.marginals.size() < 30);
}

TEST_CASE("results do not depend on the worker count") {
  KernelTable a, c;
  DensitySeries sa, sc;
  {
    ThreadsEnv env("1");
    a = build(kSetI, 20, 6).table;
    sa = iterate(a, a.row_of(0.5), 4);
  }
  {
    ThreadsEnv env("3");
    c = build(kSetI, 20, 6).table;
    sc = iterate(c, c.row_of(0.5), 4);
  }
  CHECK(a.P1 == c.P1);
  CHECK(sa.marginals == sc.marginals);
}

TEST_CASE("table file round trip") {
  const auto b = build(kSetII, 10, 4);
  const auto path = std::filesystem::temp_directory_path() / "fpt_table_test.bin";
  save_table(b.table, path);
  const auto back = load_table(path);
  CHECK(back.P1 == b.table.P1);
  CHECK(back.Q1 == b.table.Q1);
  CHECK(back.starts == b.table.starts);
  CHECK(back.grid.x_nodes == b.grid.x_nodes);
  std::filesystem::remove(path);

  const auto bad = std::filesystem::temp_directory_path() / "fpt_table_bad.bin";
  { std::ofstream(bad) << "XXXX"; }
  CHECK_THROWS_AS(load_table(bad), UsageError);
  std::filesystem::remove(bad);
}

TEST_CASE("marginal csv") {
  const auto b = build(kSetII, 10, 4);
  const auto s = iterate(b.table, b.table.row_of(0.5), 2);
  const auto csv = marginals_csv(s, b.grid);
  CHECK(csv.rfind("t,p_star_1,p_star_2\n0.25,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 11);
}

TEST_CASE("grid refinement stays within the plateau scale") {
  const auto fd = fd_first_passage(kSetII, 0.5, 5.0, FdConfig{1000, 10000, 15.0});
  const auto coarse = build(kSetII, 50, 10);
  const auto fine = build(kSetII, 100, 20);
  const auto sc = iterate(coarse.table, coarse.table.row_of(0.5), 8);
  const auto sf = iterate(fine.table, fine.table.row_of(0.5), 8);
  const double plateau = l1_distance(sc.marginals.back(), fd_cells(fd, 50), coarse.grid);
  std::vector<double> fine_on_coarse(50);
  for (int j = 0; j < 50; ++j) fine_on_coarse[j] = 0.5 * (sf.marginals[3][2 * j] + sf.marginals[3][2 * j + 1]);
  CHECK(l1_distance(sc.marginals[3], fine_on_coarse, coarse.grid) <= 2.0 * plateau);
}
