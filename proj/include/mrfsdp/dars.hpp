#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "mrfsdp/encoding.hpp"
#include "mrfsdp/manifold.hpp"
#include "mrfsdp/mrf.hpp"
#include "mrfsdp/staircase.hpp"

namespace mrfsdp {

struct DualParams {
  double step_size = 0.005;
  int max_iterations = 1000;
  double grad_tol = 0.5;  // on max_i |gradient_i|
  /// Divergence: the gradient stays above `divergence_factor` times its
  /// running minimum for `divergence_window` consecutive iterations.
  double divergence_factor = 10.0;
  int divergence_window = 50;

  void validate() const;
  bool operator==(const DualParams&) const = default;
};

struct DarsOptions {
  SolverParams params = SolverParams::dars_defaults();
  DualParams dual;
  std::uint64_t seed = 0;
};

struct DualIterate {
  int iteration = 0;
  /// Lower bound on d(lambda) from the staircase dual point, without offset.
  double dual_value = 0.0;
  double primal_objective = 0.0;  // trace(L_lambda R R')
  double grad_inf_norm = 0.0;
  int rank = 0;
  bool certified = false;
};

struct DarsResult {
  Labeling labeling;
  /// Best dual value over all iterates plus offset: a lower bound on the
  /// relaxation optimum and on the MRF optimum.
  double f_relaxed = 0.0;
  /// trace(L R R') + offset at the final primal point.
  double f_primal = 0.0;
  double f_rounded = 0.0;
  double subopt_bound = 0.0;
  double offset = 0.0;
  bool dual_converged = false;
  bool primal_certified = false;
  bool diverged = false;
  int dual_iterations = 0;
  double constraint_residual_max = 0.0;
  double min_eigenvalue = 0.0;  // certificate of the final primal solve
  Eigen::VectorXd lambda;
  std::vector<DualIterate> history;
  std::vector<RankStep> rank_history;  // final primal solve
  ProductStiefelPoint point;
  double solve_seconds = 0.0;
  double round_seconds = 0.0;
};

/// L + sum_i lambda_i (U_i + U_i') / 2.
SparseMatrix lagrangian_matrix(const PmEncoding& enc,
                               const Eigen::VectorXd& lambda);

/// gradient_i = trace(U_i R R') - (2 - K).
Eigen::VectorXd dual_gradient(const PmEncoding& enc,
                              const ProductStiefelPoint& point);

DarsResult dars_solve(const MrfInstance& mrf, const DarsOptions& options,
                      std::ostream* log = nullptr);

/// Leading singular direction of R scaled by its singular value, sign fixed
/// so the homogenising entry is non-negative, then argmax per node block.
Labeling dars_round(const ProductStiefelPoint& point, int num_nodes,
                    int num_labels);

struct DarsCertificate {
  bool is_certificate = false;  // converged dual and certified primal
  bool bound_valid = false;
  double gap = 0.0;  // f_rounded - f_relaxed
};

/// With an exact optimum, bound_valid checks f_rounded - f_opt <= gap;
/// without one it only reports gap >= 0.
DarsCertificate dars_certificate(const DarsResult& result,
                                 std::optional<double> f_opt = std::nullopt,
                                 double slack = 1e-8);

}  // namespace mrfsdp
