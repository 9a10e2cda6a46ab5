#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>

#include "fpt/cli.hpp"
#include "fpt/errors.hpp"
#include "fpt/io.hpp"

namespace fpt::cli {

namespace {

constexpr int kSchemaVersion = 1;

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::filesystem::path out_dir(const RunConfig& c) {
  std::filesystem::path p(c.out);
  std::filesystem::create_directories(p);
  return p;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  write_file_atomic(path, j.dump(2) + "\n");
}

nlohmann::json fmt(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

struct Solved {
  SpaceTimeGrid grid;
  KernelTable table;
  DensitySeries series;
  double precompute_s = 0.0;
  double iterate_s = 0.0;
};

Solved solve(const RunConfig& c, int n_iter, double tol) {
  Solved s;
  s.grid = make_grid(c);
  TableOptions opts{c.grid.gauss_t, c.grid.gauss_x, {c.x0}};
  Stopwatch w1;
  s.table = build_kernel_table(c.model, s.grid, c.quadrature, opts);
  s.precompute_s = w1.seconds();
  Stopwatch w2;
  s.series = iterate(s.table, s.table.row_of(c.x0), n_iter, tol);
  s.iterate_s = w2.seconds();
  return s;
}

double per_iteration(const Solved& s) {
  const auto n = s.series.marginals.size();
  return n > 1 ? s.iterate_s / static_cast<double>(n - 1) : s.iterate_s;
}

// Minimal CSV reader for the numeric files this tool writes.
struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<double>> cols;

  int col(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
  }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

Csv parse_csv(const std::string& text, const std::string& what) {
  std::stringstream in(text);
  std::string line;
  Csv csv;
  if (!std::getline(in, line)) throw UsageError(what + ": empty file");
  csv.header = split(line);
  csv.cols.resize(csv.header.size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != csv.header.size()) throw UsageError(what + ": ragged row");
    for (std::size_t i = 0; i < cells.size(); ++i) {
      double v = 0.0;
      const auto r = std::from_chars(cells[i].data(), cells[i].data() + cells[i].size(), v);
      if (r.ec != std::errc() || r.ptr != cells[i].data() + cells[i].size()) {
        throw UsageError(what + ": bad number '" + cells[i] + "'");
      }
      csv.cols[i].push_back(v);
    }
  }
  if (csv.cols.empty() || csv.cols[0].empty()) throw UsageError(what + ": no data rows");
  return csv;
}

struct Curve {
  std::vector<double> t;  // uniform cell midpoints
  std::vector<double> y;
  double horizon() const { return t.back() + t.front(); }
};

double interpolate(const Curve& c, double t) {
  if (t <= c.t.front()) return c.y.front();
  if (t >= c.t.back()) return c.y.back();
  const auto it = std::upper_bound(c.t.begin(), c.t.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - c.t.begin());
  const double a = (t - c.t[i - 1]) / (c.t[i] - c.t[i - 1]);
  return (1.0 - a) * c.y[i - 1] + a * c.y[i];
}

// FD output (t, density) or MC output (t_lo, t_hi, ..., density, ...)
Curve oracle_curve(const Csv& csv) {
  Curve c;
  const int d = csv.col("density");
  if (d < 0) throw UsageError("oracle csv: no density column");
  if (csv.col("t") >= 0) {
    c.t = csv.cols[csv.col("t")];
  } else if (csv.col("t_lo") >= 0 && csv.col("t_hi") >= 0) {
    const auto& lo = csv.cols[csv.col("t_lo")];
    const auto& hi = csv.cols[csv.col("t_hi")];
    for (std::size_t i = 0; i < lo.size(); ++i) c.t.push_back(0.5 * (lo[i] + hi[i]));
  } else {
    throw UsageError("oracle csv: no time column");
  }
  c.y = csv.cols[d];
  return c;
}

}  // namespace

void cmd_kernel(const RunConfig& c, const KernelRequest& r, std::ostream& log) {
  Stopwatch w;
  const KernelValue v = p1(c.model, r.x0, r.s, r.x1, r.route, c.quadrature);
  const double secs = w.seconds();
  log << "route=" << to_string(r.route) << " x0=" << format_double(r.x0) << " s=" << format_double(r.s)
      << " x1=" << format_double(r.x1) << "\n"
      << "value=" << format_double(v.value) << "\n"
      << "error_estimate=" << format_double(v.error_estimate) << "\n"
      << "pre_clamp=" << format_double(v.pre_clamp) << "\n"
      << "seconds=" << format_double(secs) << "\n";
}

void cmd_solve(const RunConfig& c, std::ostream& log) {
  const auto dir = out_dir(c);
  const Solved s = solve(c, c.iteration.n_iter, c.iteration.tol);

  write_file_atomic(dir / "p_star_iterates.csv", marginals_csv(s.series, s.grid));
  std::string l1 = "iterate,l1_step,log10_l1_step\n";
  for (std::size_t i = 0; i < s.series.l1_steps.size(); ++i) {
    l1 += std::to_string(i + 2) + ',' + format_double(s.series.l1_steps[i]) + ',' +
          format_double(std::log10(s.series.l1_steps[i])) + '\n';
  }
  write_file_atomic(dir / "l1_convergence.csv", l1);

  nlohmann::json masses = nlohmann::json::array();
  for (const auto& m : s.series.marginals) masses.push_back(absorbed_mass(m, s.grid));
  const nlohmann::json summary = {
      {"schema_version", kSchemaVersion},
      {"command", "solve"},
      {"config", to_json(c)},
      {"iterates", s.series.marginals.size()},
      {"c_hat", s.series.c_hat},
      {"final_l1_step", s.series.l1_steps.empty() ? nlohmann::json(nullptr) : fmt(s.series.l1_steps.back())},
      {"converged", s.series.converged},
      {"absorbed_mass", masses},
      {"timings", {{"precomputing_s", s.precompute_s}, {"per_iteration_s", per_iteration(s)}}},
  };
  write_json(dir / "summary.json", summary);
  log << "iterates=" << s.series.marginals.size() << " c_hat=" << format_double(s.series.c_hat)
      << " precomputing_s=" << format_double(s.precompute_s)
      << " per_iteration_s=" << format_double(per_iteration(s)) << "\n"
      << "wrote " << (dir / "p_star_iterates.csv").string() << "\n";
}

void cmd_oracle(const RunConfig& c, const std::string& which, std::ostream& log) {
  const auto dir = out_dir(c);
  nlohmann::json summary = {{"schema_version", kSchemaVersion}, {"command", "oracle"}, {"which", which},
                            {"config", to_json(c)}};
  Stopwatch w;
  std::filesystem::path file;
  if (which == "fd") {
    const FdResult r = fd_first_passage(c.model, c.x0, c.T, c.fd);
    file = dir / "fd_reference.csv";
    write_file_atomic(file, fd_csv(r));
    summary["absorbed_mass"] = 1.0 - r.survival.back();
  } else if (which == "mc") {
    McConfig m = c.mc;
    m.T = c.T;
    const McResult r = mc_first_passage(c.model, c.x0, m);
    file = dir / "mc_survival.csv";
    write_file_atomic(file, mc_csv(r));
    summary["passed_fraction"] = static_cast<double>(r.passed) / r.n_paths;
  } else {
    throw UsageError("oracle: --which must be fd or mc");
  }
  summary["seconds"] = w.seconds();
  write_json(dir / ("oracle_" + which + "_summary.json"), summary);
  log << which << " seconds=" << format_double(summary["seconds"].get<double>()) << "\n"
      << "wrote " << file.string() << "\n";
}

CompareReport compare_tables(const std::string& solve_text, const std::string& oracle_text) {
  const Csv sc = parse_csv(solve_text, "solve csv");
  const Csv oc = parse_csv(oracle_text, "oracle csv");
  if (sc.col("t") != 0 || sc.cols.size() < 2) throw UsageError("solve csv: expected t,p_star_1,...");
  const Curve oracle = oracle_curve(oc);
  Curve base{sc.cols[0], {}};
  const double h1 = base.horizon(), h2 = oracle.horizon();
  if (std::abs(h1 - h2) > 1e-9 * std::max(h1, h2)) {
    throw UsageError("compare: horizons differ (" + format_double(h1) + " vs " + format_double(h2) + ")");
  }
  const Curve& fine = oracle.t.size() >= base.t.size() ? oracle : base;
  const double dt = h1 / static_cast<double>(fine.t.size());

  CompareReport rep;
  for (std::size_t i = 1; i < sc.cols.size(); ++i) {
    const Curve it{sc.cols[0], sc.cols[i]};
    double l1 = 0.0;
    for (double t : fine.t) l1 += std::abs(interpolate(it, t) - interpolate(oracle, t));
    l1 *= dt;
    rep.l1.push_back(l1);
    rep.log10_l1.push_back(std::log10(l1));
  }
  // flattened: the last step shrank the error by less than 30%
  const auto n = rep.l1.size();
  rep.plateau = n >= 3 && rep.l1[n - 1] > 0.7 * rep.l1[n - 2];
  return rep;
}

void cmd_compare(const std::filesystem::path& solve_csv, const std::filesystem::path& oracle_csv,
                 const std::filesystem::path& dir, std::ostream& log) {
  const CompareReport rep = compare_tables(read_file(solve_csv), read_file(oracle_csv));
  std::filesystem::create_directories(dir);
  std::string csv = "iterate,l1,log10_l1\n";
  for (std::size_t i = 0; i < rep.l1.size(); ++i) {
    csv += std::to_string(i + 1) + ',' + format_double(rep.l1[i]) + ',' + format_double(rep.log10_l1[i]) + '\n';
    log << "iterate " << i + 1 << " l1=" << format_double(rep.l1[i]) << " log10=" << format_double(rep.log10_l1[i])
        << "\n";
  }
  log << "plateau=" << (rep.plateau ? "yes" : "no") << "\n";
  write_file_atomic(dir / "compare.csv", csv);
  nlohmann::json l1 = nlohmann::json::array();
  for (double v : rep.l1) l1.push_back(v);
  write_json(dir / "compare_summary.json", {{"schema_version", kSchemaVersion},
                                            {"command", "compare"},
                                            {"solve_csv", solve_csv.string()},
                                            {"oracle_csv", oracle_csv.string()},
                                            {"l1", l1},
                                            {"plateau", rep.plateau}});
}

// Row/column structure of the timing and convergence tables; absolute numbers are
// machine dependent.
void cmd_bench(const RunConfig& c, std::ostream& log) {
  const auto dir = out_dir(c);
  Stopwatch wfd;
  const FdResult ref = fd_first_passage(c.model, c.x0, c.T, c.fd);
  const double fd_ref_s = wfd.seconds();

  std::string iter_csv = "n_x,n_t,precomputing_s,per_iteration_s\n";
  std::string conv_csv = "n_x,n_t,iterate,l1,log10_l1\n";
  for (int nx : {10, 20}) {
    for (int nt : {10, 25, 50, 100, 200}) {
      RunConfig r = c;
      r.grid.n_x = nx;
      r.grid.n_t = nt;
      const Solved s = solve(r, std::max(c.iteration.n_iter, 6), 0.0);
      iter_csv += std::to_string(nx) + ',' + std::to_string(nt) + ',' + format_double(s.precompute_s) + ',' +
                  format_double(per_iteration(s)) + '\n';
      const auto rep = compare_tables(marginals_csv(s.series, s.grid), fd_csv(ref));
      for (std::size_t i = 0; i < rep.l1.size(); ++i) {
        conv_csv += std::to_string(nx) + ',' + std::to_string(nt) + ',' + std::to_string(i + 1) + ',' +
                    format_double(rep.l1[i]) + ',' + format_double(rep.log10_l1[i]) + '\n';
      }
      log << "n_x=" << nx << " n_t=" << nt << " precomputing_s=" << format_double(s.precompute_s)
          << " per_iteration_s=" << format_double(per_iteration(s)) << "\n";
    }
  }

  std::string fd_bench = "n_x,n_t,seconds\n";
  for (int nx : {1150, 2300, 3450, 4600, 5750}) {
    FdConfig f = c.fd;
    f.n_x = nx;
    Stopwatch w;
    fd_first_passage(c.model, c.x0, c.T, f);
    fd_bench += std::to_string(nx) + ',' + std::to_string(f.n_t) + ',' + format_double(w.seconds()) + '\n';
  }
  write_file_atomic(dir / "bench_iteration.csv", iter_csv);
  write_file_atomic(dir / "bench_convergence.csv", conv_csv);
  write_file_atomic(dir / "bench_fd.csv", fd_bench);
  write_json(dir / "bench_summary.json", {{"schema_version", kSchemaVersion},
                                          {"command", "bench"},
                                          {"config", to_json(c)},
                                          {"fd_reference_s", fd_ref_s}});
  log << "wrote bench_iteration.csv bench_convergence.csv bench_fd.csv to " << dir.string() << "\n";
}

}  // namespace fpt::cli
