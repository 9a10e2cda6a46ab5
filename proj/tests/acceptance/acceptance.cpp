// Runs the acceptance criteria and prints one PASS/FAIL line for each.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fpt/fft.hpp"
#include "fpt/iteration.hpp"
#include "fpt/kernel.hpp"
#include "fpt/oracles.hpp"

using namespace fpt;

namespace {

const LsbmSpec kSetI = make_lsbm(0.2, make_variance_gamma(1.0));
const LsbmSpec kSetII = make_lsbm(-0.2, make_variance_gamma(2.0));
constexpr double kX0 = 0.5;
constexpr double kT = 5.0;

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

struct Run {
  SpaceTimeGrid grid;
  KernelTable table;
  DensitySeries series;
};

Run solve(const LsbmSpec& l, int nt, int nx, int n_iter) {
  Run r;
  r.grid = make_grid(kT, nt, nx, 10.0);
  TableOptions o;
  o.sources = {kX0};
  r.table = build_kernel_table(l, r.grid, {}, o);
  r.series = iterate(r.table, r.table.row_of(kX0), n_iter);
  return r;
}

// reference FD at the stated resolution, averaged onto n cells
const FdResult& reference(const LsbmSpec& l) {
  static const FdResult one = fd_first_passage(kSetI, kX0, kT, FdConfig{1000, 10000, 15.0});
  static const FdResult two = fd_first_passage(kSetII, kX0, kT, FdConfig{1000, 10000, 15.0});
  return l.beta > 0 ? one : two;
}

std::vector<double> on_cells(const FdResult& r, int n) {
  std::vector<double> c(n, 0.0);
  const int per = static_cast<int>(r.density.size()) / n;
  for (std::size_t i = 0; i < r.density.size(); ++i) c[i / per] += r.density[i] / per;
  return c;
}

std::vector<double> errors(const Run& r, const LsbmSpec& l) {
  const auto ref = on_cells(reference(l), r.grid.n_t);
  std::vector<double> e;
  for (const auto& m : r.series.marginals) e.push_back(l1_distance(m, ref, r.grid));
  return e;
}

struct Outcome {
  bool pass;
  std::string detail;
};

Outcome route_equivalence() {
  double rel = 0.0, abs_real = 0.0;
  for (const auto* l : {&kSetI, &kSetII}) {
    for (double x0 : {0.1, 0.25, 0.5, 1.0, 2.0}) {
      for (double s : {0.1, 0.5, 1.0, 2.0, 5.0}) {
        for (double x1 : {-2.0, -1.0, -0.5, -0.1, 0.5}) {
          const double g = p1_generic(*l, x0, s, x1).value;
          const double v = p1_vg(*l, x0, s, x1).value;
          const double r = p1_generic_real(*l, x0, s, x1).value;
          rel = std::max(rel, std::abs(g - v) / std::max(v, 1e-8));
          abs_real = std::max(abs_real, std::abs(g - r));
        }
      }
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "max rel |generic-vg| = %.2e (<= 1e-4), max |generic-real| = %.2e (<= 1e-5)",
                rel, abs_real);
  return {rel <= 1e-4 && abs_real <= 1e-5, buf};
}

Outcome small_time_limit() {
  double worst = 0.0, worst_vg = 0.0;
  for (double x0 : {0.1, 0.5, 1.0, 2.0, 4.0}) {
    for (double x1 : {-2.0, -0.5, -0.1, 0.0, 0.7}) {
      for (const auto* l : {&kSetI}) {
        const double a = p1_vg_plancherel(*l, x0, 0.0, x1).value;
        const double b = p1_vg_s0(*l, x0, x1);
        worst = std::max(worst, std::abs(a - b) / b);
      }
    }
  }
  for (const auto* l : {&kSetI, &kSetII}) {
    for (auto [x0, x1] : std::vector<std::pair<double, double>>{{0.5, -0.5}, {0.5, -0.25}, {1.0, -1.0}, {0.25, -0.1}}) {
      const double v = p1_vg(*l, x0, 1e-3, x1).value;
      const double b = p1_vg_s0(*l, x0, x1);
      worst_vg = std::max(worst_vg, std::abs(v - b) / b);
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "plancherel(s=0) vs closed form rel %.2e (<= 1e-10); Ei at s=1e-3 rel %.2e (<= 0.02)",
                worst, worst_vg);
  return {worst <= 1e-10 && worst_vg <= 0.02, buf};
}

Outcome figure2() {
  const double e1 = errors(solve(kSetI, 50, 10, 3), kSetI)[2];
  const double e2 = errors(solve(kSetII, 50, 10, 3), kSetII)[2];
  char buf[160];
  std::snprintf(buf, sizeof buf, "3rd iterate L1 vs FD: set I %.4f, set II %.4f (<= 0.05)", e1, e2);
  return {e1 <= 0.05 && e2 <= 0.05, buf};
}

Outcome contraction() {
  bool ok = true;
  std::string detail;
  for (const auto* l : {&kSetI, &kSetII}) {
    const Run r = solve(*l, 50, 10, 8);
    const double c = contraction_estimate(r.table);
    const double bound = l == &kSetII ? 0.5 : 1.0;
    ok = ok && c < bound;
    double worst = 0.0;
    for (std::size_t i = 1; i < r.series.l1_steps.size(); ++i) {
      worst = std::max(worst, r.series.l1_steps[i] / r.series.l1_steps[i - 1]);
    }
    ok = ok && worst <= c + 0.05;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%sset %s C=%.4f (< %.1f), max step ratio %.3f (<= C+0.05)",
                  detail.empty() ? "" : "; ", l == &kSetI ? "I" : "II", c, bound, worst);
    detail += buf;
  }
  return {ok, detail};
}

Outcome figure3() {
  const auto coarse = errors(solve(kSetII, 10, 10, 8), kSetII);
  const auto mid = errors(solve(kSetII, 50, 10, 8), kSetII);
  const auto fine = errors(solve(kSetII, 200, 20, 8), kSetII);
  bool decreasing = true;
  for (int i = 1; i <= 3; ++i) decreasing = decreasing && mid[i] < mid[i - 1];
  const double last_change = std::abs(mid[7] - mid[6]) / mid[6];
  const bool flat = last_change < 0.1;
  const bool lower = fine.back() < coarse.back();
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "N_x=10 errors decrease over iterates 1-4: %s, last change %.1f%% (< 10%%); plateau %.4f "
                "(N_x=20,N_t=200) < %.4f (N_x=10,N_t=10)",
                decreasing ? "yes" : "no", 100.0 * last_change, fine.back(), coarse.back());
  return {decreasing && flat && lower, buf};
}

Outcome monte_carlo() {
  // N_x = 20: at N_x = 10 the space discretization alone shifts the 4th iterate by about
  // 2 standard errors in the later buckets
  const Run r = solve(kSetI, 50, 20, 4);
  McConfig c;
  c.n_paths = 100000;
  c.dt_sim = 1e-3;
  c.seed = 20240601;
  c.T = kT;
  c.bucket = kT / 50;
  const McResult mc = mc_first_passage(kSetI, kX0, c);
  int n = 0, inside = 0;
  for (std::size_t j = 0; j < mc.density.size(); ++j) {
    if (mc.t_lo[j] < 0.2 - 1e-9) continue;
    ++n;
    if (std::abs(r.series.marginals[3][j] - mc.density[j]) <= 3.0 * mc.density_stderr[j]) ++inside;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "N_t=50, N_x=20: %d of %d buckets on [0.2, 5] within 3 standard errors (%.1f%%, >= 90%%)", inside, n,
                100.0 * inside / n);
  return {inside >= 0.9 * n, buf};
}

Outcome mass_bounds() {
  const Run a = solve(kSetI, 50, 10, 8);
  const Run b = solve(kSetII, 50, 10, 8);
  const double ma = absorbed_mass(a.series.marginals.back(), a.grid);
  const double mb = absorbed_mass(b.series.marginals.back(), b.grid);
  const double inc = std::max(reference(kSetI).max_survival_increase, reference(kSetII).max_survival_increase);
  char buf[160];
  std::snprintf(buf, sizeof buf, "absorbed mass set I %.4f, set II %.4f (<= 1.001); FD survival max increase %.1e",
                ma, mb, inc);
  return {ma <= 1.001 && mb <= 1.001 && inc <= 0.0, buf};
}

Outcome performance() {
  const auto t0 = std::chrono::steady_clock::now();
  solve(kSetI, 50, 10, 4);
  const double secs = seconds_since(t0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> a(64), b(64);
  for (int i = 0; i < 64; ++i) {
    a[i] = u(rng);
    b[i] = u(rng);
  }
  const auto f = causal_convolve_fft(a, b);
  const auto d = causal_convolve_direct(a, b);
  double diff = 0.0;
  for (int i = 0; i < 64; ++i) diff = std::max(diff, std::abs(f[i] - d[i]));
  char buf[160];
  std::snprintf(buf, sizeof buf, "precompute + 4 iterations %.3f s (< 1 s); fft vs direct on n_t=64 %.1e (<= 1e-10)",
                secs, diff);
  return {secs < 1.0 && diff <= 1e-10, buf};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"route equivalence", route_equivalence},
      {"s=0 analytic limit", small_time_limit},
      {"third iterate vs finite differences", figure2},
      {"contraction", contraction},
      {"error decay and plateau", figure3},
      {"Monte Carlo consistency", monte_carlo},
      {"mass bounds", mass_bounds},
      {"performance envelope", performance},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o{false, ""};
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %zu %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
