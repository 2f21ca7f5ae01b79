#include "mrfsdp/dars.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <vector>

#include <Eigen/SVD>

#include "mrfsdp/error.hpp"

namespace mrfsdp {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

void DualParams::validate() const {
  if (!(std::isfinite(step_size) && step_size > 0.0)) {
    throw InvalidInputError("dual step size must be positive");
  }
  if (max_iterations < 1) {
    throw InvalidInputError("dual iteration limit must be positive");
  }
  if (!(std::isfinite(grad_tol) && grad_tol > 0.0)) {
    throw InvalidInputError("dual gradient tolerance must be positive");
  }
  if (!(divergence_factor > 1.0) || divergence_window < 1) {
    throw InvalidInputError("divergence rule needs factor > 1 and window >= 1");
  }
}

SparseMatrix lagrangian_matrix(const PmEncoding& enc,
                               const Eigen::VectorXd& lambda) {
  if (lambda.size() != enc.num_nodes) {
    throw InvalidInputError("lambda must have one entry per node");
  }
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(2 * enc.num_nodes * enc.num_labels);
  const int last = enc.last();
  for (int i = 0; i < enc.num_nodes; ++i) {
    if (lambda(i) == 0.0) continue;
    const double half = lambda(i) / 2.0;
    for (int c = 0; c < enc.num_labels; ++c) {
      triplets.emplace_back(enc.block_begin(i) + c, last, half);
      triplets.emplace_back(last, enc.block_begin(i) + c, half);
    }
  }
  SparseMatrix shift(enc.dim, enc.dim);
  shift.setFromTriplets(triplets.begin(), triplets.end());
  SparseMatrix out = enc.cost + shift;
  out.makeCompressed();
  return out;
}

Eigen::VectorXd dual_gradient(const PmEncoding& enc,
                              const ProductStiefelPoint& point) {
  if (point.R.rows() != enc.dim) {
    throw InvalidInputError("factor does not have NK+1 rows");
  }
  Eigen::VectorXd g(enc.num_nodes);
  for (int i = 0; i < enc.num_nodes; ++i) {
    g(i) = constraint_value_factor(enc, i, point.R) - enc.rhs;
  }
  return g;
}

Labeling dars_round(const ProductStiefelPoint& point, int num_nodes,
                    int num_labels) {
  if (point.R.rows() != num_nodes * num_labels + 1) {
    throw InvalidInputError("factor does not have NK+1 rows");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(point.R, Eigen::ComputeThinU);
  Eigen::VectorXd v = svd.matrixU().col(0) * svd.singularValues()(0);
  if (v(v.size() - 1) < 0.0) v = -v;
  Labeling x(num_nodes, 0);
  for (int i = 0; i < num_nodes; ++i) {
    int best = 0;
    for (int c = 1; c < num_labels; ++c) {
      if (v(i * num_labels + c) > v(i * num_labels + best)) best = c;
    }
    x[i] = best;
  }
  return x;
}

DarsResult dars_solve(const MrfInstance& mrf, const DarsOptions& options,
                      std::ostream* log) {
  options.params.validate();
  options.dual.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const PmEncoding enc = encode_pm(mrf);
  const ManifoldShape base{enc.dim, 0, 2};
  const DualParams& dp = options.dual;

  DarsResult res;
  res.offset = enc.offset;
  res.lambda = Eigen::VectorXd::Zero(enc.num_nodes);
  std::optional<ProductStiefelPoint> warm;
  StaircaseResult sc;
  double best_dual = -std::numeric_limits<double>::infinity();
  double min_grad = std::numeric_limits<double>::infinity();
  int above = 0;

  for (int t = 0; t < dp.max_iterations; ++t) {
    const SymmetricCost cost(lagrangian_matrix(enc, res.lambda));
    sc = staircase_solve(cost, base, 2, options.params, warm,
                         options.seed + static_cast<std::uint64_t>(t), nullptr);
    warm = sc.point;
    const Eigen::VectorXd g = dual_gradient(enc, sc.point);

    DualIterate it;
    it.iteration = t;
    it.dual_value = sc.dual_bound - enc.rhs * res.lambda.sum();
    it.primal_objective = sc.objective;
    it.grad_inf_norm = g.cwiseAbs().maxCoeff();
    it.rank = sc.point.shape.rank;
    it.certified = sc.certified;
    res.history.push_back(it);
    res.dual_iterations = t + 1;
    best_dual = std::max(best_dual, it.dual_value);
    if (log) {
      *log << "dars iter=" << t << " grad_inf=" << it.grad_inf_norm
           << " primal=" << it.primal_objective << " dual=" << it.dual_value
           << " rank=" << it.rank << " certified=" << it.certified << "\n";
    }

    if (it.grad_inf_norm < dp.grad_tol) {
      res.dual_converged = true;
      break;
    }
    if (it.grad_inf_norm < min_grad) {
      min_grad = it.grad_inf_norm;
      above = 0;
    } else if (it.grad_inf_norm >= dp.divergence_factor * min_grad) {
      if (++above >= dp.divergence_window) {
        res.diverged = true;
        break;
      }
    } else {
      above = 0;
    }
    res.lambda += dp.step_size * g;
  }

  res.point = sc.point;
  res.primal_certified = sc.certified;
  res.min_eigenvalue = sc.min_eigenvalue;
  res.rank_history = sc.rank_history;
  res.constraint_residual_max = res.history.back().grad_inf_norm;
  const SymmetricCost plain(enc.cost);
  res.f_primal = plain.objective(sc.point.R) + enc.offset;
  res.f_relaxed = best_dual + enc.offset;
  res.solve_seconds = seconds_since(t0);

  const auto t1 = std::chrono::steady_clock::now();
  res.labeling = dars_round(sc.point, enc.num_nodes, enc.num_labels);
  res.round_seconds = seconds_since(t1);
  res.f_rounded = energy(mrf, res.labeling);
  res.subopt_bound = res.f_rounded - res.f_relaxed;
  return res;
}

DarsCertificate dars_certificate(const DarsResult& result,
                                 std::optional<double> f_opt, double slack) {
  DarsCertificate c;
  c.is_certificate = result.dual_converged && result.primal_certified;
  c.gap = result.f_rounded - result.f_relaxed;
  if (f_opt) {
    c.bound_valid = result.f_rounded - *f_opt <= c.gap + slack;
  } else {
    c.bound_valid = c.gap >= -slack;
  }
  return c;
}

}  // namespace mrfsdp
