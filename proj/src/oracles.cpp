#include "fpt/oracles.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "fpt/errors.hpp"
#include "fpt/fft.hpp"
#include "fpt/io.hpp"
#include "fpt/parallel.hpp"

namespace fpt {

void FdConfig::validate() const {
  if (n_t < 8 || n_x < 8) throw UsageError("fd: n_t and n_x must be >= 8");
  if (n_x % 2 != 0) throw UsageError("fd: n_x must be even");
  if (!(X > 0.0) || !std::isfinite(X)) throw UsageError("fd: X must be > 0");
}

void McConfig::validate() const {
  if (n_paths < 1) throw UsageError("mc: n_paths must be >= 1");
  if (!(dt_sim > 0.0) || !(T > 0.0) || !(bucket > 0.0)) {
    throw UsageError("mc: dt_sim, T and bucket must be > 0");
  }
  if (dt_sim > T) throw UsageError("mc: dt_sim exceeds T");
}

TransitionRow transition_row(const LsbmSpec& lsbm, double dt, int n_x, double X) {
  if (!(dt > 0.0)) throw DomainError("transition_row: dt must be > 0");
  const int len = 2 * n_x;
  const double dx = 2.0 * X / n_x;
  const double du = 2.0 * std::numbers::pi / (len * dx);
  RealFft fft(len);
  // c2r computes sum_l X_l e^{+2 pi i l n / len}; feeding phi(-u_l) = conj(phi(u_l))
  // gives the inversion sum with e^{-i u x}.
  std::vector<std::complex<double>> spec(fft.spectrum_size());
  for (int l = 0; l < fft.spectrum_size(); ++l) {
    spec[l] = std::conj(std::exp(x_char_exponent(lsbm, cplx(l * du, 0.0), dt)));
  }
  std::vector<double> raw;
  fft.inverse(spec, raw);

  TransitionRow row;
  row.dx = dx;
  row.center = n_x;
  row.p.assign(len, 0.0);
  double total = 0.0, negative = 0.0;
  for (int j = -n_x; j < n_x; ++j) {
    double v = raw[(j + len) % len] / len;
    if (v < 0.0) {
      negative -= v;
      v = 0.0;
    }
    row.p[row.center + j] = v;
    total += v;
  }
  if (negative > 0.01 * total) {
    throw AccuracyError("transition_row: negative mass above 1%, increase n_x", negative);
  }
  for (double& v : row.p) v /= total;
  row.clamped_mass = negative;
  return row;
}

FdResult fd_first_passage(const LsbmSpec& lsbm, double x0, double T, const FdConfig& cfg) {
  cfg.validate();
  if (!(T > 0.0)) throw UsageError("fd: T must be > 0");
  if (!(x0 > 0.0) || !(x0 < cfg.X)) throw UsageError("fd: x0 must lie in (0, X)");
  const int n = cfg.n_x;
  const double dt = T / cfg.n_t;
  const TransitionRow row = transition_row(lsbm, dt, n, cfg.X);
  const double dx = row.dx;
  auto node = [&](int m) { return -cfg.X + (m + 0.5) * dx; };

  // f_{i+1}(x_m) = 1{x_m > 0} sum_y p(y - m) g[y], g = f_i extended above the grid by its
  // top value. With rev[i] = P(move = n - i) this is (g * rev)[m + n].
  const int len = fft_size(4 * n + 1);
  RealFft fft(len);
  std::vector<double> rev(2 * n + 1, 0.0);
  for (int i = 1; i <= 2 * n; ++i) rev[i] = row.p[row.center + n - i];
  std::vector<std::complex<double>> rev_spec, g_spec;
  fft.forward(rev, rev_spec);

  std::vector<double> f(n), g(2 * n), conv;
  for (int m = 0; m < n; ++m) f[m] = node(m) > 0.0 ? 1.0 : 0.0;

  const int m0 = static_cast<int>(std::floor((x0 + cfg.X) / dx - 0.5));
  const double frac = (x0 - node(m0)) / dx;
  auto at_x0 = [&](const std::vector<double>& v) { return (1.0 - frac) * v[m0] + frac * v[m0 + 1]; };

  FdResult out;
  out.survival.push_back(at_x0(f));
  for (int i = 0; i < cfg.n_t; ++i) {
    std::copy(f.begin(), f.end(), g.begin());
    std::fill(g.begin() + n, g.end(), f[n - 1]);
    fft.forward(g, g_spec);
    for (std::size_t k = 0; k < g_spec.size(); ++k) g_spec[k] *= rev_spec[k];
    fft.inverse(g_spec, conv);
    for (int m = 0; m < n; ++m) {
      const double v = node(m) > 0.0 ? std::clamp(conv[m + n] / len, 0.0, 1.0) : 0.0;
      out.max_survival_increase = std::max(out.max_survival_increase, v - f[m]);
      f[m] = v;
    }
    out.survival.push_back(at_x0(f));
    out.t.push_back((i + 0.5) * dt);
    out.density.push_back((out.survival[i] - out.survival[i + 1]) / dt);
  }
  return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Increment of the subordinator over one step of length dt.
class ClockSampler {
 public:
  ClockSampler(const SubordinatorSpec& spec, double dt) : spec_(spec), dt_(dt) {}

  double operator()(std::mt19937_64& rng) const {
    return std::visit([&](const auto& p) { return sample(p, rng); }, spec_);
  }

 private:
  double sample(const VarianceGammaSubordinator& p, std::mt19937_64& rng) const {
    std::gamma_distribution<double> gamma(dt_ / p.nu, p.nu);
    return p.b * dt_ + gamma(rng);
  }

  // Inverse Gaussian with mean gt dt / bt and shape (gt dt)^2 (Michael, Schucany, Haas).
  double sample(const NigSubordinator& p, std::mt19937_64& rng) const {
    const double mu = p.gamma_tilde * dt_ / p.beta_tilde;
    const double lambda = (p.gamma_tilde * dt_) * (p.gamma_tilde * dt_);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> uniform;
    const double z = normal(rng);
    const double y = z * z;
    const double x = mu + mu * mu * y / (2.0 * lambda) -
                     mu / (2.0 * lambda) * std::sqrt(4.0 * mu * lambda * y + mu * mu * y * y);
    return uniform(rng) <= mu / (mu + x) ? x : mu * mu / x;
  }

  // drift plus compound Poisson with rate c and Exp(a) jumps: psi(u) = bu + cu/(a+u)
  double sample(const ExponentialSubordinator& p, std::mt19937_64& rng) const {
    std::poisson_distribution<int> count(p.c * dt_);
    std::exponential_distribution<double> jump(p.a);
    double t = p.b * dt_;
    for (int k = count(rng); k > 0; --k) t += jump(rng);
    return t;
  }

  const SubordinatorSpec& spec_;
  double dt_;
};

}  // namespace

double clock_increment(const SubordinatorSpec& spec, double dt, std::mt19937_64& rng) {
  if (!(dt > 0.0)) throw DomainError("clock_increment: dt must be > 0");
  return ClockSampler(spec, dt)(rng);
}

McResult mc_first_passage(const LsbmSpec& lsbm, double x0, const McConfig& cfg) {
  cfg.validate();
  const long steps = std::lround(cfg.T / cfg.dt_sim);
  const int buckets = static_cast<int>(std::ceil(cfg.T / cfg.bucket - 1e-9));
  const ClockSampler clock(lsbm.subordinator, cfg.dt_sim);

  // Blocks of paths; each path seeds its own generator, so the merged histogram does
  // not depend on the number of blocks or threads.
  const long block = 1024;
  const long n_blocks = (cfg.n_paths + block - 1) / block;
  std::vector<std::vector<long>> hist(n_blocks, std::vector<long>(buckets, 0));
  parallel_for(static_cast<std::size_t>(n_blocks), [&](std::size_t b) {
    std::normal_distribution<double> normal;
    const long lo = static_cast<long>(b) * block;
    const long hi = std::min(cfg.n_paths, lo + block);
    for (long path = lo; path < hi; ++path) {
      if (x0 <= 0.0) {
        ++hist[b][0];
        continue;
      }
      std::mt19937_64 rng(splitmix64(cfg.seed ^ static_cast<std::uint64_t>(path)));
      double x = x0;
      for (long k = 0; k < steps; ++k) {
        const double d = clock(rng);
        x += lsbm.beta * d + std::sqrt(d) * normal(rng);
        if (x <= 0.0) {
          const double t = (k + 1) * cfg.dt_sim;
          ++hist[b][std::min(buckets - 1, static_cast<int>(t / cfg.bucket))];
          break;
        }
      }
    }
  });

  McResult r;
  r.n_paths = cfg.n_paths;
  r.counts.assign(buckets, 0);
  for (const auto& h : hist) {
    for (int i = 0; i < buckets; ++i) r.counts[i] += h[i];
  }
  const double n = static_cast<double>(cfg.n_paths);
  long cum = 0;
  for (int i = 0; i < buckets; ++i) {
    const double lo = i * cfg.bucket;
    const double hi = std::min(cfg.T, lo + cfg.bucket);
    const double w = hi - lo;
    const double p = r.counts[i] / n;
    cum += r.counts[i];
    const double s = 1.0 - cum / n;
    r.t_lo.push_back(lo);
    r.t_hi.push_back(hi);
    r.density.push_back(p / w);
    r.density_stderr.push_back(std::sqrt(p * (1.0 - p) / n) / w);
    r.survival.push_back(s);
    r.survival_stderr.push_back(std::sqrt(s * (1.0 - s) / n));
  }
  r.passed = cum;
  return r;
}

std::string fd_csv(const FdResult& r) {
  std::string s = "t,density\n";
  for (std::size_t i = 0; i < r.t.size(); ++i) s += format_double(r.t[i]) + ',' + format_double(r.density[i]) + '\n';
  return s;
}

std::string mc_csv(const McResult& r) {
  std::string s = "t_lo,t_hi,survival,stderr,density,density_stderr\n";
  for (std::size_t i = 0; i < r.t_lo.size(); ++i) {
    s += format_double(r.t_lo[i]) + ',' + format_double(r.t_hi[i]) + ',' + format_double(r.survival[i]) +
         ',' + format_double(r.survival_stderr[i]) + ',' + format_double(r.density[i]) + ',' +
         format_double(r.density_stderr[i]) + '\n';
  }
  return s;
}

namespace {

void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> keys, const char* what) {
  if (!j.is_object()) throw UsageError(std::string(what) + ": expected a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (std::find_if(keys.begin(), keys.end(), [&](const char* a) { return k == a; }) == keys.end()) {
      throw UsageError(std::string(what) + ": unknown key '" + k + "'");
    }
  }
}

}  // namespace

nlohmann::json to_json(const FdConfig& c) { return {{"n_t", c.n_t}, {"n_x", c.n_x}, {"X", c.X}}; }

FdConfig fd_config_from_json(const nlohmann::json& j) {
  reject_unknown(j, {"n_t", "n_x", "X"}, "fd");
  FdConfig c;
  c.n_t = j.value("n_t", c.n_t);
  c.n_x = j.value("n_x", c.n_x);
  c.X = j.value("X", c.X);
  c.validate();
  return c;
}

nlohmann::json to_json(const McConfig& c) {
  return {{"n_paths", c.n_paths}, {"dt_sim", c.dt_sim}, {"seed", c.seed}, {"T", c.T}, {"bucket", c.bucket}};
}

McConfig mc_config_from_json(const nlohmann::json& j) {
  reject_unknown(j, {"n_paths", "dt_sim", "seed", "T", "bucket"}, "mc");
  McConfig c;
  c.n_paths = j.value("n_paths", c.n_paths);
  c.dt_sim = j.value("dt_sim", c.dt_sim);
  c.seed = j.value("seed", c.seed);
  c.T = j.value("T", c.T);
  c.bucket = j.value("bucket", c.bucket);
  c.validate();
  return c;
}

}  // namespace fpt
