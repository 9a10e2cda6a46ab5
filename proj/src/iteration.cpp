#include "fpt/iteration.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "fpt/errors.hpp"
#include "fpt/fft.hpp"
#include "fpt/io.hpp"
#include "fpt/parallel.hpp"

namespace fpt {

namespace {

struct UnitRule {
  std::vector<double> x;  // nodes in (0, 1)
  std::vector<double> w;  // weights summing to 1
};

template <int N>
UnitRule gauss_unit_n() {
  using G = boost::math::quadrature::gauss<double, N>;
  UnitRule r;
  const auto& a = G::abscissa();
  const auto& w = G::weights();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double wi = 0.5 * w[i];  // boost lists the nonnegative half of a symmetric rule on [-1,1]
    if (a[i] == 0.0) {
      r.x.push_back(0.5);
      r.w.push_back(wi);
    } else {
      r.x.push_back(0.5 - 0.5 * a[i]);
      r.w.push_back(wi);
      r.x.push_back(0.5 + 0.5 * a[i]);
      r.w.push_back(wi);
    }
  }
  return r;
}

UnitRule gauss_unit(int n) {
  switch (n) {
    case 1: return {{0.5}, {1.0}};
    case 2: return gauss_unit_n<2>();
    case 3: return gauss_unit_n<3>();
    case 4: return gauss_unit_n<4>();
    case 5: return gauss_unit_n<5>();
    case 6: return gauss_unit_n<6>();
    case 7: return gauss_unit_n<7>();
    case 8: return gauss_unit_n<8>();
  }
  throw UsageError("gauss rule order must be in 1..8");
}

double cell_lo(const SpaceTimeGrid& g, int k) {
  const int n = g.n_x();
  return k < n ? -g.x_edges[n - k] : g.x_edges[k - n];
}

double cell_hi(const SpaceTimeGrid& g, int k) {
  const int n = g.n_x();
  return k < n ? -g.x_edges[n - 1 - k] : g.x_edges[k - n + 1];
}

std::string describe(double x0, double x1) {
  std::ostringstream s;
  s << " at x0=" << x0 << " x1=" << x1;
  return s.str();
}

}  // namespace

void TableOptions::validate() const {
  if (gauss_t < 1 || gauss_t > 8 || gauss_x < 1 || gauss_x > 8) {
    throw UsageError("table: gauss orders must be in 1..8");
  }
  for (double s : sources) {
    if (!(s > 0.0) || !std::isfinite(s)) throw UsageError("table: source levels must be > 0");
  }
}

double KernelTable::cell_width(int k) const { return cell_hi(grid, k) - cell_lo(grid, k); }

int KernelTable::row_of(double x0) const {
  for (int r = 0; r < n_rows(); ++r) {
    if (starts[r] == x0) return r;
  }
  throw UsageError("table has no row starting at x0=" + format_double(x0));
}

KernelTable build_kernel_table(const LsbmSpec& lsbm, const SpaceTimeGrid& grid,
                               const QuadratureConfig& cfg, const TableOptions& opts) {
  cfg.validate();
  opts.validate();
  KernelTable t;
  t.grid = grid;
  t.starts = grid.x_nodes;
  t.starts.insert(t.starts.end(), opts.sources.begin(), opts.sources.end());
  const int rows = t.n_rows();
  const int cells = t.n_cells();
  const int nt = grid.n_t;
  t.P1.assign(static_cast<std::size_t>(rows) * nt * cells, 0.0);
  t.Q1.assign(static_cast<std::size_t>(rows) * nt, 0.0);

  const UnitRule rt = gauss_unit(opts.gauss_t);
  const UnitRule rx = gauss_unit(opts.gauss_x);
  const bool vg = lsbm.is_variance_gamma() && lsbm.vg().b == 0.0;
  const auto form = vg ? KernelSlice::Form::kEi : KernelSlice::Form::kComplex2d;

  // one task per (row, space cell); each writes only its own entries
  parallel_for(static_cast<std::size_t>(rows) * cells, [&](std::size_t task) {
    const int r = static_cast<int>(task / cells);
    const int k = static_cast<int>(task % cells);
    const double x0 = t.starts[r];
    const double lo = cell_lo(grid, k), hi = cell_hi(grid, k);
    std::vector<double> acc(nt, 0.0);
    for (std::size_t a = 0; a < rx.x.size(); ++a) {
      const double x1 = lo + rx.x[a] * (hi - lo);
      try {
        const KernelSlice slice(lsbm, x0, x1, cfg, form);
        for (std::size_t b = 0; b < rt.x.size(); ++b) {
          const auto vals = slice.progression(rt.x[b] * grid.dt, grid.dt, nt);
          for (int j = 0; j < nt; ++j) acc[j] += rx.w[a] * rt.w[b] * vals[j].value;
        }
      } catch (const AccuracyError& e) {
        throw AccuracyError(e.what() + describe(x0, x1), e.residual());
      } catch (const UnsupportedError& e) {
        throw UnsupportedError(e.what() + describe(x0, x1));
      } catch (const DomainError& e) {
        throw DomainError(e.what() + describe(x0, x1));
      }
    }
    for (int j = 0; j < nt; ++j) {
      if (!std::isfinite(acc[j])) throw NumericalError("table: non-finite entry" + describe(x0, lo));
      t.P1[(static_cast<std::size_t>(r) * nt + j) * cells + k] = acc[j];
    }
  });

  for (int r = 0; r < rows; ++r) {
    double mass = 0.0;
    for (int j = 0; j < nt; ++j) {
      double q = 0.0;
      for (int k = 0; k < grid.n_x(); ++k) q += t.cell_width(k) * t.p1(r, j, k);
      t.Q1[static_cast<std::size_t>(r) * nt + j] = q;
      for (int k = 0; k < cells; ++k) mass += grid.dt * t.cell_width(k) * t.p1(r, j, k);
    }
    if (mass > 1.0 + 1e-3) {
      throw NumericalError("table: row x0=" + format_double(t.starts[r]) +
                           " has mass " + format_double(mass) + " > 1");
    }
  }
  return t;
}

DensitySeries iterate(const KernelTable& table, int row, int n_iter, double tol) {
  if (n_iter < 1 || n_iter > 64) throw UsageError("iterate: n_iter must be in 1..64");
  if (row < 0 || row >= table.n_rows()) throw UsageError("iterate: row out of range");
  const SpaceTimeGrid& g = table.grid;
  const int nt = g.n_t;
  const int nx = g.n_x();
  const int cells = table.n_cells();
  const std::size_t row_len = static_cast<std::size_t>(nt) * cells;

  auto marginal_of = [&](const std::vector<double>& joint) {
    std::vector<double> m(nt, 0.0);
    for (int j = 0; j < nt; ++j) {
      for (int k = 0; k < nx; ++k) m[j] += table.cell_width(k) * joint[j * cells + k];
    }
    return m;
  };

  DensitySeries out;
  out.row = row;
  double c = 0.0;
  for (int r = 0; r < nx; ++r) c = std::max(c, positive_mass(table, r));
  out.c_hat = c;

  std::vector<double> joint(table.P1.begin() + row * row_len, table.P1.begin() + (row + 1) * row_len);
  out.joints.push_back(joint);
  out.marginals.push_back(marginal_of(joint));
  if (n_iter == 1) return out;

  // Spectra of every node row, per output cell. Node row k starts in positive cell nx + k.
  const int len = fft_size(2 * nt);
  RealFft plan(len);
  const int ns = plan.spectrum_size();
  std::vector<std::complex<double>> kernel_spec(static_cast<std::size_t>(nx) * cells * ns);
  parallel_for(static_cast<std::size_t>(nx) * cells, [&](std::size_t task) {
    const int k = static_cast<int>(task / cells);
    const int m = static_cast<int>(task % cells);
    RealFft local(len);
    std::vector<double> col(nt);
    for (int j = 0; j < nt; ++j) col[j] = table.p1(k, j, m);
    std::vector<std::complex<double>> s;
    local.forward(col, s);
    std::copy(s.begin(), s.end(), kernel_spec.begin() + task * ns);
  });

  for (int it = 2; it <= n_iter; ++it) {
    // mass still above the barrier, per starting cell
    std::vector<std::complex<double>> alive(static_cast<std::size_t>(nx) * ns);
    {
      std::vector<double> col(nt);
      std::vector<std::complex<double>> s;
      for (int k = 0; k < nx; ++k) {
        for (int j = 0; j < nt; ++j) col[j] = g.cell_weights[k] * joint[j * cells + nx + k];
        plan.forward(col, s);
        std::copy(s.begin(), s.end(), alive.begin() + static_cast<std::size_t>(k) * ns);
      }
    }
    std::vector<double> next(row_len, 0.0);
    parallel_for(cells, [&](std::size_t mi) {
      const int m = static_cast<int>(mi);
      std::vector<std::complex<double>> acc(ns, 0.0);
      for (int k = 0; k < nx; ++k) {
        const auto* a = &alive[static_cast<std::size_t>(k) * ns];
        const auto* b = &kernel_spec[(static_cast<std::size_t>(k) * cells + m) * ns];
        for (int f = 0; f < ns; ++f) acc[f] += a[f] * b[f];
      }
      RealFft local(len);
      std::vector<double> conv;
      local.inverse(acc, conv);
      // piecewise constant convolution averaged over cell j: dt/2 (c[j] + c[j-1])
      for (int j = 0; j < nt; ++j) {
        const double cj = conv[j] / len;
        const double cp = j > 0 ? conv[j - 1] / len : 0.0;
        double v = 0.5 * g.dt * (cj + cp);
        if (m < nx) v += joint[j * cells + m];  // absorbed mass stays where it landed
        next[j * cells + m] = v;
      }
    });
    for (double v : next) {
      if (!std::isfinite(v)) throw NumericalError("iterate: non-finite value in iterate " + std::to_string(it));
    }
    joint = std::move(next);
    out.joints.push_back(joint);
    out.marginals.push_back(marginal_of(joint));
    const double step = l1_distance(out.marginals[it - 1], out.marginals[it - 2], g);
    out.l1_steps.push_back(step);
    if (step < tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

double l1_distance(const std::vector<double>& f, const std::vector<double>& g,
                   const SpaceTimeGrid& grid) {
  if (f.size() != g.size() || static_cast<int>(f.size()) != grid.n_t) {
    throw UsageError("l1_distance: marginals do not match the grid");
  }
  double s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) s += std::abs(f[j] - g[j]);
  return s * grid.dt;
}

double positive_mass(const KernelTable& table, int row) {
  const int nx = table.grid.n_x();
  double m = 0.0;
  for (int j = 0; j < table.grid.n_t; ++j) {
    for (int k = 0; k < nx; ++k) m += table.grid.cell_weights[k] * table.p1(row, j, nx + k);
  }
  return m * table.grid.dt;
}

double contraction_estimate(const KernelTable& table) {
  double c = 0.0;
  for (int r = 0; r < table.grid.n_x(); ++r) c = std::max(c, positive_mass(table, r));
  if (!(c < 1.0)) throw NumericalError("contraction estimate " + format_double(c) + " is not below 1");
  return c;
}

double absorbed_mass(const std::vector<double>& marginal, const SpaceTimeGrid& grid) {
  double s = 0.0;
  for (double v : marginal) s += v;
  return s * grid.dt;
}

// Binary layout, little endian: "FPT1", u32 version, f64 T, u32 n_t, u32 n_x, f64 X,
// u32 law, u32 rows, f64 starts[rows], f64 P1[...], f64 Q1[...].
namespace {

constexpr std::uint32_t kTableVersion = 1;

template <class T>
void put(std::string& out, T v) {
  static_assert(sizeof(T) == 4 || sizeof(T) == 8);
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  const U u = std::bit_cast<U>(v);
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<char>((u >> (8 * i)) & 0xff));
}

template <class T>
T take(std::string_view& in) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  if (in.size() < sizeof(U)) throw UsageError("table file truncated");
  U u = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) u |= static_cast<U>(static_cast<unsigned char>(in[i])) << (8 * i);
  in.remove_prefix(sizeof(U));
  return std::bit_cast<T>(u);
}

}  // namespace

void save_table(const KernelTable& table, const std::filesystem::path& path) {
  std::string out = "FPT1";
  const auto& g = table.grid;
  put(out, kTableVersion);
  put(out, g.T);
  put(out, static_cast<std::uint32_t>(g.n_t));
  put(out, static_cast<std::uint32_t>(g.n_x()));
  put(out, g.X);
  put(out, static_cast<std::uint32_t>(g.law == GridLaw::kLinear ? 0 : 1));
  put(out, static_cast<std::uint32_t>(table.n_rows()));
  for (double v : table.starts) put(out, v);
  for (double v : table.P1) put(out, v);
  for (double v : table.Q1) put(out, v);
  write_file_atomic(path, out);
}

KernelTable load_table(const std::filesystem::path& path) {
  const std::string data = read_file(path);
  std::string_view in(data);
  if (in.substr(0, 4) != "FPT1") throw UsageError("not a kernel table file: " + path.string());
  in.remove_prefix(4);
  if (take<std::uint32_t>(in) != kTableVersion) throw UsageError("unsupported table version");
  const double T = take<double>(in);
  const int nt = static_cast<int>(take<std::uint32_t>(in));
  const int nx = static_cast<int>(take<std::uint32_t>(in));
  const double X = take<double>(in);
  const auto law = take<std::uint32_t>(in) == 0 ? GridLaw::kLinear : GridLaw::kQuadratic;
  const int rows = static_cast<int>(take<std::uint32_t>(in));
  KernelTable t;
  t.grid = make_grid(T, nt, nx, X, law);
  for (int r = 0; r < rows; ++r) t.starts.push_back(take<double>(in));
  t.P1.resize(static_cast<std::size_t>(rows) * nt * 2 * nx);
  for (double& v : t.P1) v = take<double>(in);
  t.Q1.resize(static_cast<std::size_t>(rows) * nt);
  for (double& v : t.Q1) v = take<double>(in);
  if (!in.empty()) throw UsageError("table file has trailing bytes");
  return t;
}

std::string marginals_csv(const DensitySeries& series, const SpaceTimeGrid& grid) {
  std::string s = "t";
  for (std::size_t i = 1; i <= series.marginals.size(); ++i) s += ",p_star_" + std::to_string(i);
  s += '\n';
  for (int j = 0; j < grid.n_t; ++j) {
    s += format_double(grid.t_mid(j));
    for (const auto& m : series.marginals) s += ',' + format_double(m[j]);
    s += '\n';
  }
  return s;
}

}  // namespace fpt
