#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fpt/grid.hpp"
#include "fpt/kernel.hpp"

namespace fpt {

struct TableOptions {
  int gauss_t = 2;  // Gauss-Legendre points per time cell for the cell averages
  int gauss_x = 3;  // same per space cell
  std::vector<double> sources;  // extra starting levels appended after the grid nodes

  void validate() const;
};

/// Cell averages of p*_1(x0; s, x) over time cell j and space cell k, for each starting
/// level x0 in `starts` (the positive grid nodes first, then the extra sources).
/// Space cells run over the negative cells (ascending) followed by the positive cells.
struct KernelTable {
  SpaceTimeGrid grid;
  std::vector<double> starts;
  std::vector<double> P1;  // [row][j][k], k < 2 n_x
  std::vector<double> Q1;  // [row][j], mass of the row on x < 0

  int n_rows() const { return static_cast<int>(starts.size()); }
  int n_cells() const { return 2 * grid.n_x(); }
  double p1(int row, int j, int k) const {
    return P1[(static_cast<std::size_t>(row) * grid.n_t + j) * n_cells() + k];
  }
  double q1(int row, int j) const { return Q1[static_cast<std::size_t>(row) * grid.n_t + j]; }
  /// Width of space cell k in the combined (negative then positive) ordering.
  double cell_width(int k) const;
  /// Row whose starting level equals x0 exactly; throws UsageError otherwise.
  int row_of(double x0) const;
};

KernelTable build_kernel_table(const LsbmSpec& lsbm, const SpaceTimeGrid& grid,
                               const QuadratureConfig& cfg = {}, const TableOptions& opts = {});

struct DensitySeries {
  int row = 0;
  std::vector<std::vector<double>> marginals;  // per iterate, n_t cell averages
  std::vector<std::vector<double>> joints;     // per iterate, [j][k] flattened like a table row
  std::vector<double> l1_steps;                // l1(marginal i+1, marginal i)
  double c_hat = 0.0;
  bool converged = false;  // stopped because an L1 step fell below tol
};

/// Runs the recursion from starting row `row` for at most n_iter iterates
/// (the kernel itself is the first). Stops early once an L1 step is below tol.
DensitySeries iterate(const KernelTable& table, int row, int n_iter, double tol = 0.0);

double l1_distance(const std::vector<double>& f, const std::vector<double>& g,
                   const SpaceTimeGrid& grid);

/// Largest mass a grid-node row puts on x > 0 within the table. Throws NumericalError if >= 1.
double contraction_estimate(const KernelTable& table);

/// Mass on x > 0 for one row.
double positive_mass(const KernelTable& table, int row);

/// Cumulative integral of a marginal over [0, T].
double absorbed_mass(const std::vector<double>& marginal, const SpaceTimeGrid& grid);

void save_table(const KernelTable& table, const std::filesystem::path& path);
KernelTable load_table(const std::filesystem::path& path);

/// Columns t, p_star_1, ..., one row per time cell midpoint.
std::string marginals_csv(const DensitySeries& series, const SpaceTimeGrid& grid);

}  // namespace fpt
