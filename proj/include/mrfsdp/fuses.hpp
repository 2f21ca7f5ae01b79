#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "mrfsdp/encoding.hpp"
#include "mrfsdp/manifold.hpp"
#include "mrfsdp/mrf.hpp"
#include "mrfsdp/staircase.hpp"

namespace mrfsdp {

struct FusesOptions {
  SolverParams params = SolverParams::fuses_defaults();
  std::uint64_t seed = 0;
  /// Start from the unary-argmin labeling instead of a random point.
  bool warm_start = false;
};

struct FusesResult {
  Labeling labeling;
  /// Lower bound on the relaxation optimum, energy units. Valid whether or
  /// not the run certified.
  double f_relaxed = 0.0;
  /// trace(Q R R') + offset at the returned factor.
  double f_primal = 0.0;
  double f_rounded = 0.0;
  double subopt_bound = 0.0;  // f_rounded - f_relaxed
  double offset = 0.0;
  bool certified = false;
  bool rank_deficient = false;
  double min_singular_value_ratio = 0.0;
  double min_eigenvalue = 0.0;
  std::vector<RankStep> rank_history;
  ProductStiefelPoint point;
  double solve_seconds = 0.0;
  double round_seconds = 0.0;
};

FusesResult fuses_solve(const MrfInstance& mrf, const FusesOptions& options,
                        std::ostream* log = nullptr);

/// One-hot N x K matrix from the row-wise argmax of R_top R_bottom'.
/// Ties go to the lowest label.
Eigen::MatrixXd fuses_round(const ProductStiefelPoint& point, int num_nodes,
                            int num_labels);

/// Initial FUSES point built from labeling x: [X; I_K] padded with zeros to
/// `rank` columns, nudged along a small random tangent direction.
ProductStiefelPoint fuses_initial_point(const Labeling& x, int num_labels,
                                        int rank, std::uint64_t seed,
                                        double perturbation = 1e-3);

}  // namespace mrfsdp
