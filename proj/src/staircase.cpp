#include "mrfsdp/staircase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "mrfsdp/error.hpp"
#include "mrfsdp/random.hpp"

namespace mrfsdp {

namespace {

// Steihaug-Toint forcing sequence: stop once |r| <= |r0| min(kappa, |r0|^theta).
constexpr double kCgKappa = 0.1;
constexpr double kCgTheta = 1.0;
// Minimum ratio of actual to predicted decrease for accepting a step.
constexpr double kAcceptRatio = 0.05;
// Below this size the certificate matrix is diagonalised densely.
constexpr int kDenseEigenLimit = 500;

enum class CgStatus { Converged, NegativeCurvature, Boundary, MaxIterations };

struct CgResult {
  Eigen::MatrixXd step;
  Eigen::MatrixXd hess_step;
  CgStatus status = CgStatus::MaxIterations;
  int iterations = 0;
};

double to_boundary(const Eigen::MatrixXd& h, const Eigen::MatrixXd& d,
                   double radius) {
  const double hd = inner(h, d);
  const double dd = inner(d, d);
  const double hh = inner(h, h);
  const double disc = std::max(0.0, hd * hd + dd * (radius * radius - hh));
  return (-hd + std::sqrt(disc)) / dd;
}

template <typename Hess>
CgResult truncated_cg(const Eigen::MatrixXd& grad, const Hess& hess,
                      double radius, int max_iterations) {
  CgResult out;
  out.step = Eigen::MatrixXd::Zero(grad.rows(), grad.cols());
  out.hess_step = Eigen::MatrixXd::Zero(grad.rows(), grad.cols());
  Eigen::MatrixXd r = grad;
  Eigen::MatrixXd d = -grad;
  double rr = inner(r, r);
  const double r0 = std::sqrt(rr);
  const double target = r0 * std::min(kCgKappa, std::pow(r0, kCgTheta));

  for (int k = 0; k < max_iterations; ++k) {
    out.iterations = k + 1;
    const Eigen::MatrixXd Hd = hess(d);
    const double dHd = inner(d, Hd);
    if (dHd <= 0.0) {
      const double tau = to_boundary(out.step, d, radius);
      out.step += tau * d;
      out.hess_step += tau * Hd;
      out.status = CgStatus::NegativeCurvature;
      return out;
    }
    const double alpha = rr / dHd;
    const Eigen::MatrixXd next = out.step + alpha * d;
    if (next.norm() >= radius) {
      const double tau = to_boundary(out.step, d, radius);
      out.step += tau * d;
      out.hess_step += tau * Hd;
      out.status = CgStatus::Boundary;
      return out;
    }
    out.step = next;
    out.hess_step += alpha * Hd;
    r += alpha * Hd;
    const double rr_next = inner(r, r);
    if (std::sqrt(rr_next) <= target) {
      out.status = CgStatus::Converged;
      return out;
    }
    d = -r + (rr_next / rr) * d;
    rr = rr_next;
  }
  out.status = CgStatus::MaxIterations;
  return out;
}

struct Multipliers {
  Eigen::VectorXd diag;    // sphere rows
  Eigen::MatrixXd bottom;  // Stiefel block
};

Multipliers multipliers(const SymmetricCost& cost,
                        const ProductStiefelPoint& point) {
  const Eigen::MatrixXd MR = cost.apply(point.R);
  const int n = point.shape.sphere_rows;
  const int k = point.shape.bottom_rows;
  Multipliers out;
  out.diag.resize(n);
  for (int i = 0; i < n; ++i) out.diag(i) = MR.row(i).dot(point.R.row(i));
  if (k > 0) {
    const Eigen::MatrixXd P =
        MR.bottomRows(k) * point.R.bottomRows(k).transpose();
    out.bottom = 0.5 * (P + P.transpose());
  }
  return out;
}

}  // namespace

void SolverParams::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(grad_norm_tol) || !positive(eig_tol) ||
      !positive(rel_func_decrease_tol) || !positive(initial_tr_radius)) {
    throw InvalidInputError("solver tolerances and radius must be positive");
  }
  if (max_tnt_iterations < 1 || max_cg_iterations < 1 ||
      max_staircase_steps < 1) {
    throw InvalidInputError("iteration limits must be positive");
  }
  if (!(tr_decrease_factor > 0.0 && tr_decrease_factor < 1.0)) {
    throw InvalidInputError("trust-region decrease factor must lie in (0,1)");
  }
  if (!(tr_increase_factor > 1.0) || !std::isfinite(tr_increase_factor)) {
    throw InvalidInputError("trust-region increase factor must exceed 1");
  }
  if (!(cg_success_eta > 0.0 && cg_success_eta < 1.0)) {
    throw InvalidInputError("cg_success_eta must lie in (0,1)");
  }
}

std::string to_string(TntStop stop) {
  switch (stop) {
    case TntStop::GradientNorm:
      return "gradient_norm";
    case TntStop::RelativeDecrease:
      return "relative_decrease";
    case TntStop::MaxIterations:
      return "max_iterations";
    case TntStop::RadiusCollapse:
      return "radius_collapse";
  }
  return "unknown";
}

TntResult tnt_minimize(const SymmetricCost& cost,
                       const ProductStiefelPoint& initial,
                       const SolverParams& params, std::ostream* log) {
  params.validate();
  if (initial.R.rows() != cost.dim()) {
    throw InvalidInputError("point and cost matrix dimensions differ");
  }
  TntResult res;
  res.point = initial;
  res.objective = cost.objective(res.point.R);
  if (!std::isfinite(res.objective)) {
    throw NumericalFailureError("non-finite objective at the initial point",
                                initial.R);
  }
  Eigen::MatrixXd egrad = euclidean_gradient(cost, res.point);
  Eigen::MatrixXd grad = project_tangent(res.point, egrad);
  res.grad_norm = grad.norm();
  if (!std::isfinite(res.grad_norm)) {
    throw NumericalFailureError("non-finite gradient at the initial point",
                                initial.R);
  }
  double radius = params.initial_tr_radius;

  while (true) {
    if (res.grad_norm < params.grad_norm_tol) {
      res.stop = TntStop::GradientNorm;
      break;
    }
    if (res.iterations >= params.max_tnt_iterations) {
      res.stop = TntStop::MaxIterations;
      break;
    }
    ++res.iterations;

    auto hess = [&](const Eigen::MatrixXd& v) {
      return riemannian_hessian_vec(cost, res.point, egrad, v);
    };
    CgResult cg = truncated_cg(grad, hess, radius, params.max_cg_iterations);
    res.cg_iterations += cg.iterations;
    const double model_decrease =
        -(inner(grad, cg.step) + 0.5 * inner(cg.hess_step, cg.step));

    bool accepted = false;
    double rho = -std::numeric_limits<double>::infinity();
    double decrease = 0.0;
    ProductStiefelPoint trial;
    try {
      trial = retract(res.point, cg.step);
    } catch (const DegenerateStepError&) {
      trial.R.resize(0, 0);
    }
    if (trial.R.size() > 0) {
      const double f_trial = cost.objective(trial.R);
      if (!std::isfinite(f_trial)) {
        throw NumericalFailureError("non-finite objective at a trial point",
                                    res.point.R);
      }
      decrease = res.objective - f_trial;
      if (model_decrease > 0.0) rho = decrease / model_decrease;
      if (rho >= kAcceptRatio && decrease > 0.0) {
        accepted = true;
        const double previous = res.objective;
        res.point = std::move(trial);
        res.objective = f_trial;
        egrad = euclidean_gradient(cost, res.point);
        grad = project_tangent(res.point, egrad);
        res.grad_norm = grad.norm();
        if (!std::isfinite(res.grad_norm)) {
          throw NumericalFailureError("non-finite gradient at an accepted point",
                                      res.point.R);
        }
        ++res.accepted_steps;
        if (rho > params.cg_success_eta &&
            (cg.status == CgStatus::Boundary ||
             cg.status == CgStatus::NegativeCurvature)) {
          radius *= params.tr_increase_factor;
        }
        const double scale = std::max(std::abs(previous), 1e-300);
        if (log) {
          *log << "tnt iter=" << res.iterations << " f=" << res.objective
               << " grad_norm=" << res.grad_norm << " radius=" << radius
               << " rank=" << res.point.shape.rank << " rho=" << rho
               << " cg_iters=" << cg.iterations << " accepted=1\n";
        }
        if (res.grad_norm >= params.grad_norm_tol &&
            decrease / scale < params.rel_func_decrease_tol) {
          res.stop = TntStop::RelativeDecrease;
          break;
        }
      }
    }
    if (!accepted) {
      radius *= params.tr_decrease_factor;
      if (log) {
        *log << "tnt iter=" << res.iterations << " f=" << res.objective
             << " grad_norm=" << res.grad_norm << " radius=" << radius
             << " rank=" << res.point.shape.rank << " rho=" << rho
             << " cg_iters=" << cg.iterations << " accepted=0\n";
      }
      if (radius < 1e-14) {
        res.stop = TntStop::RadiusCollapse;
        break;
      }
    }
  }
  return res;
}

RankCheck check_rank_deficiency(const ProductStiefelPoint& point,
                                double eig_tol) {
  RankCheck out;
  if (point.R.size() == 0) return out;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(point.R, Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double smax = s(0);
  // A rank-r matrix has r singular values; fewer rows than columns means
  // the missing ones are exactly zero.
  const double smin = point.R.rows() < point.R.cols() ? 0.0 : s(s.size() - 1);
  out.ratio = smax > 0.0 ? smin / smax : 0.0;
  out.deficient = out.ratio < eig_tol;
  if (out.deficient) {
    if (point.R.rows() < point.R.cols()) {
      Eigen::JacobiSVD<Eigen::MatrixXd> full(point.R, Eigen::ComputeFullV);
      out.null_direction = full.matrixV().col(point.R.cols() - 1);
    } else {
      out.null_direction = svd.matrixV().col(s.size() - 1);
    }
  }
  return out;
}

EigenPair lanczos_smallest(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& op, int dim,
    std::uint64_t seed, int max_iterations, double tol) {
  if (dim < 1) throw InvalidInputError("operator dimension must be positive");
  const int m_max = std::min(dim, max_iterations);
  Rng rng(seed);
  Eigen::MatrixXd basis(dim, m_max);
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v(i) = rng.normal();
  v.normalize();
  std::vector<double> alpha;
  std::vector<double> beta;
  EigenPair best;
  double scale = 0.0;

  for (int j = 0; j < m_max; ++j) {
    basis.col(j) = v;
    Eigen::VectorXd w = op(v);
    const double a = v.dot(w);
    alpha.push_back(a);
    w -= a * v;
    if (j > 0) w -= beta.back() * basis.col(j - 1);
    for (int pass = 0; pass < 2; ++pass) {
      w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).transpose() * w);
    }
    const double b = w.norm();
    const int m = j + 1;
    const bool exhausted = b < 1e-13 * std::max(1.0, scale) || m == m_max;
    if (m % 5 == 0 || exhausted) {
      Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
      Eigen::VectorXd sub(std::max(0, m - 1));
      for (int i = 0; i + 1 < m; ++i) sub(i) = beta[i];
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
      tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
      const Eigen::VectorXd& theta = tri.eigenvalues();
      scale = std::max(std::abs(theta(0)), std::abs(theta(m - 1)));
      const Eigen::VectorXd s = tri.eigenvectors().col(0);
      best.value = theta(0);
      best.residual = b * std::abs(s(m - 1));
      best.vector = basis.leftCols(m) * s;
      if (exhausted || best.residual <= tol * std::max(1.0, scale)) break;
    }
    beta.push_back(b);
    v = w / b;
  }
  const double norm = best.vector.norm();
  if (norm > 0.0) best.vector /= norm;
  best.residual = (op(best.vector) - best.value * best.vector).norm();
  return best;
}

EigenPair certificate_min_eigen(const SymmetricCost& cost,
                                const ProductStiefelPoint& point,
                                std::uint64_t seed) {
  const Multipliers lam = multipliers(cost, point);
  const int n = point.shape.sphere_rows;
  const int k = point.shape.bottom_rows;
  const int dim = cost.dim();

  if (dim <= kDenseEigenLimit) {
    Eigen::MatrixXd S = Eigen::MatrixXd(cost.matrix());
    for (int i = 0; i < n; ++i) S(i, i) -= lam.diag(i);
    if (k > 0) S.bottomRightCorner(k, k) -= lam.bottom;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S);
    EigenPair out;
    out.value = eig.eigenvalues()(0);
    out.vector = eig.eigenvectors().col(0);
    out.residual = (S * out.vector - out.value * out.vector).norm();
    return out;
  }

  auto apply = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd y = cost.matrix() * x;
    y.head(n) -= lam.diag.cwiseProduct(x.head(n));
    if (k > 0) y.tail(k) -= lam.bottom * x.tail(k);
    return y;
  };
  return lanczos_smallest(apply, dim, seed);
}

StaircaseResult staircase_solve(
    const SymmetricCost& cost, const ManifoldShape& base_shape,
    int initial_rank, const SolverParams& params,
    const std::optional<ProductStiefelPoint>& warm_start, std::uint64_t seed,
    std::ostream* log) {
  params.validate();
  ManifoldShape shape = base_shape;
  shape.rank = initial_rank;
  shape.validate();
  if (shape.rows() != cost.dim()) {
    throw InvalidInputError("manifold rows and cost dimension differ");
  }

  ProductStiefelPoint point;
  if (warm_start) {
    if (!(warm_start->shape.sphere_rows == shape.sphere_rows &&
          warm_start->shape.bottom_rows == shape.bottom_rows)) {
      throw InvalidInputError("warm start has a different manifold shape");
    }
    point = lift(*warm_start, std::max(initial_rank, warm_start->shape.rank));
  } else {
    point = random_point(shape, seed);
  }

  StaircaseResult res;
  EigenPair eig;
  for (int step = 0; step < params.max_staircase_steps; ++step) {
    TntResult tnt = tnt_minimize(cost, point, params, log);
    point = std::move(tnt.point);
    res.total_tnt_iterations += tnt.iterations;
    eig = certificate_min_eigen(cost, point, seed + 7919u * (step + 1));

    RankStep rs;
    rs.rank = point.shape.rank;
    rs.iterations = tnt.iterations;
    rs.grad_norm = tnt.grad_norm;
    rs.objective = tnt.objective;
    rs.min_eigenvalue = eig.value;
    rs.stop = to_string(tnt.stop);
    res.rank_history.push_back(rs);
    if (log) {
      *log << "staircase rank=" << rs.rank << " f=" << rs.objective
           << " grad_norm=" << rs.grad_norm << " iterations=" << rs.iterations
           << " min_eig=" << rs.min_eigenvalue << " stop=" << rs.stop << "\n";
    }

    if (eig.value >= -params.eig_tol) {
      res.certified = true;
      break;
    }
    const int next_rank = point.shape.rank + 1;
    if (step + 1 >= params.max_staircase_steps || next_rank > point.R.rows()) {
      break;
    }

    // Escape the saddle along the negative-curvature direction placed in the
    // new column of the zero-padded lift.
    const ProductStiefelPoint lifted = lift(point, next_rank);
    Eigen::MatrixXd direction = Eigen::MatrixXd::Zero(lifted.R.rows(), next_rank);
    direction.col(next_rank - 1) = eig.vector;
    direction = project_tangent(lifted, direction);
    const double f0 = cost.objective(lifted.R);
    double alpha = 2.0 * 100.0 * params.grad_norm_tol / std::abs(eig.value);
    bool escaped = false;
    ProductStiefelPoint trial;
    while (!escaped && alpha > 1e-16) {
      alpha /= 2.0;
      try {
        trial = retract(lifted, alpha * direction);
      } catch (const DegenerateStepError&) {
        continue;
      }
      if (cost.objective(trial.R) < f0 &&
          riemannian_gradient(cost, trial).norm() > params.grad_norm_tol) {
        escaped = true;
      }
    }
    if (!escaped) {
      if (log) *log << "staircase escape_failed rank=" << next_rank << "\n";
      break;
    }
    point = std::move(trial);
  }

  res.point = point;
  res.objective = cost.objective(point.R);
  res.min_eigenvalue = eig.value;
  const double lower_eig = std::min(0.0, eig.value - eig.residual);
  res.dual_bound = res.objective + point.R.rows() * lower_eig;
  const RankCheck rc = check_rank_deficiency(point, params.eig_tol);
  res.rank_deficient = rc.deficient;
  res.min_singular_value_ratio = rc.ratio;
  return res;
}

}  // namespace mrfsdp
