#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mrfsdp/manifold.hpp"

namespace mrfsdp {

/// Truncated-Newton trust-region and staircase parameters. Defaults suit
/// FUSES; dars_defaults() differs only in the gradient tolerance.
struct SolverParams {
  double grad_norm_tol = 1e-2;
  double eig_tol = 1e-2;
  double rel_func_decrease_tol = 1e-5;
  int max_tnt_iterations = 500;
  double initial_tr_radius = 1.0;
  double tr_decrease_factor = 0.25;  // alpha1
  double tr_increase_factor = 2.5;   // alpha2
  int max_cg_iterations = 2000;
  double cg_success_eta = 0.9;  // rho above which a boundary step grows the radius
  int max_staircase_steps = 10;

  static SolverParams fuses_defaults() { return {}; }
  static SolverParams dars_defaults() {
    SolverParams p;
    p.grad_norm_tol = 1e-3;
    return p;
  }

  /// Throws InvalidInputError when a field is out of its admissible range.
  void validate() const;

  bool operator==(const SolverParams&) const = default;
};

enum class TntStop { GradientNorm, RelativeDecrease, MaxIterations, RadiusCollapse };

std::string to_string(TntStop stop);

struct TntResult {
  ProductStiefelPoint point;
  double objective = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  int accepted_steps = 0;
  int cg_iterations = 0;
  TntStop stop = TntStop::GradientNorm;
};

/// Riemannian trust-region minimisation of trace(M R R') with a
/// Steihaug-Toint truncated CG inner solver. Accepted steps strictly
/// decrease the objective. Throws NumericalFailureError (carrying the last
/// finite iterate) if the objective stops being finite.
TntResult tnt_minimize(const SymmetricCost& cost,
                       const ProductStiefelPoint& initial,
                       const SolverParams& params, std::ostream* log = nullptr);

struct RankCheck {
  bool deficient = false;
  double ratio = 0.0;  // sigma_min / sigma_max
  std::optional<Eigen::VectorXd> null_direction;
};

/// Column-rank test on R through its singular values.
RankCheck check_rank_deficiency(const ProductStiefelPoint& point,
                                double eig_tol);

struct EigenPair {
  double value = 0.0;
  Eigen::VectorXd vector;
  double residual = 0.0;  // |S v - value v|
};

/// Smallest eigenpair of a symmetric operator by Lanczos with full
/// reorthogonalisation. Deterministic for a fixed seed.
EigenPair lanczos_smallest(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& op, int dim,
    std::uint64_t seed, int max_iterations = 400, double tol = 1e-10);

/// Smallest eigenpair of the certificate matrix S = M - Lambda(R), where
/// Lambda(R) is the block-diagonal multiplier estimate (diag(M R R') on the
/// sphere rows, sym((MR)_b R_b') on the Stiefel block). S is (half) the
/// Riemannian Hessian at the zero-padded lift of R restricted to the new
/// column; S >= 0 at a critical point certifies global optimality.
EigenPair certificate_min_eigen(const SymmetricCost& cost,
                                const ProductStiefelPoint& point,
                                std::uint64_t seed);

struct RankStep {
  int rank = 0;
  int iterations = 0;
  double grad_norm = 0.0;
  double objective = 0.0;
  double min_eigenvalue = 0.0;
  std::string stop;

  bool operator==(const RankStep&) const = default;
};

struct StaircaseResult {
  ProductStiefelPoint point;
  double objective = 0.0;
  /// Lower bound on the SDP optimum from the dual point built out of
  /// Lambda(R) shifted by min(0, lambda_min(S)).
  double dual_bound = 0.0;
  double min_eigenvalue = 0.0;
  std::vector<RankStep> rank_history;
  bool certified = false;
  bool rank_deficient = false;
  double min_singular_value_ratio = 0.0;
  int total_tnt_iterations = 0;
};

/// Riemannian staircase: minimise at rank r, test second-order optimality of
/// the rank-deficient lift through lambda_min(S), otherwise escape along the
/// negative-curvature direction at rank r+1 and repeat.
StaircaseResult staircase_solve(
    const SymmetricCost& cost, const ManifoldShape& base_shape,
    int initial_rank, const SolverParams& params,
    const std::optional<ProductStiefelPoint>& warm_start, std::uint64_t seed,
    std::ostream* log = nullptr);

}  // namespace mrfsdp
