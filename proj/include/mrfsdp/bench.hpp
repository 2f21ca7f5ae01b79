#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mrfsdp/metrics.hpp"
#include "mrfsdp/mrf.hpp"
#include "mrfsdp/runner.hpp"

namespace mrfsdp {

struct BenchSpec {
  std::vector<std::pair<int, int>> grids;  // (rows, cols)
  std::vector<int> labels;
  std::vector<std::uint64_t> seeds;
  std::vector<Method> methods;
  /// Noise and weight settings; rows, cols, labels and seed are per cell.
  GridSpec instance;
  /// Overrides each method's default TNT parameters when set.
  std::optional<SolverParams> params;
  DualParams dual;
  std::uint64_t exact_budget = kDefaultExactBudget;
  int threads = 1;
};

struct BenchCell {
  Method method = Method::Fuses;
  int rows = 0;
  int cols = 0;
  int num_labels = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  SolveResult result;
  MetricsReport metrics;
};

struct BenchReport {
  std::vector<BenchCell> cells;  // grid-major, then labels, seeds, methods
  std::string table_csv;         // mean and stddev per (method, N, K)
  std::string gap_vs_n_csv;      // medians per (method, N)
  std::string gap_vs_k_csv;      // medians per (method, K)
};

/// Generates every (grid, K, seed) instance, solves it with every method and
/// scores it against the exact optimum when that fits the budget. A failing
/// cell is recorded and the run continues.
BenchReport run_bench(const BenchSpec& spec);

/// Parses "4x4,6x6"; a bare number n means an n x n grid.
std::vector<std::pair<int, int>> parse_grid_list(const std::string& text);

}  // namespace mrfsdp
