#include "mrfsdp/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SVD>

#include "mrfsdp/error.hpp"
#include "mrfsdp/random.hpp"

namespace mrfsdp {

namespace {

Eigen::MatrixXd sym(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

// Applies the block-diagonal map built from (A, B) to C:
//   sphere row i:  (a_i . b_i) c_i
//   bottom block:  sym(A_b B_b') C_b
Eigen::MatrixXd sym_block_diag_product(const ManifoldShape& shape,
                                       const Eigen::MatrixXd& A,
                                       const Eigen::MatrixXd& B,
                                       const Eigen::MatrixXd& C) {
  Eigen::MatrixXd out(C.rows(), C.cols());
  const int n = shape.sphere_rows;
  for (int i = 0; i < n; ++i) {
    out.row(i) = A.row(i).dot(B.row(i)) * C.row(i);
  }
  if (shape.bottom_rows > 0) {
    const int k = shape.bottom_rows;
    out.bottomRows(k) =
        sym(A.bottomRows(k) * B.bottomRows(k).transpose()) * C.bottomRows(k);
  }
  return out;
}

Eigen::MatrixXd orthonormal_rows(const Eigen::MatrixXd& block) {
  // Thin QR of the transpose; flip columns so the triangular factor has a
  // positive diagonal, which makes the factor unique and continuous.
  const Eigen::Index k = block.rows();
  const Eigen::Index r = block.cols();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(block.transpose());
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(r, k);
  const Eigen::MatrixXd& packed = qr.matrixQR();
  for (Eigen::Index j = 0; j < k; ++j) {
    if (packed(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q.transpose();
}

// Polar factor U W' of block = U S W'. Unlike the QR factor it is a
// second-order retraction, which the trust-region model relies on.
Eigen::MatrixXd polar_rows(const Eigen::MatrixXd& block) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(block,
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  if (!(s(s.size() - 1) >= 1e-14)) {
    throw DegenerateStepError("retraction collapsed the Stiefel block");
  }
  return svd.matrixU() * svd.matrixV().transpose();
}

}  // namespace

void ManifoldShape::validate() const {
  if (sphere_rows < 0 || bottom_rows < 0) {
    throw InvalidInputError("row counts must be non-negative");
  }
  if (rank < 1) throw InvalidInputError("rank must be at least 1");
  if (bottom_rows > 0 && rank < bottom_rows) {
    throw InvalidInputError("rank " + std::to_string(rank) +
                            " is below the Stiefel block size " +
                            std::to_string(bottom_rows));
  }
}

SymmetricCost::SymmetricCost(SparseMatrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) {
    throw InvalidInputError("cost matrix must be square");
  }
  m_.makeCompressed();
  double scale = 1.0;
  for (int c = 0; c < m_.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(m_, c); it; ++it) {
      if (!std::isfinite(it.value())) {
        throw InvalidInputError("cost matrix has non-finite entries");
      }
      scale = std::max(scale, std::abs(it.value()));
    }
  }
  const SparseMatrix diff = SparseMatrix(m_.transpose()) - m_;
  for (int c = 0; c < diff.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(diff, c); it; ++it) {
      if (std::abs(it.value()) > 1e-12 * scale) {
        throw InvalidInputError("cost matrix is not symmetric");
      }
    }
  }
}

double SymmetricCost::objective(const Eigen::MatrixXd& R) const {
  const Eigen::MatrixXd MR = m_ * R;
  return (R.array() * MR.array()).sum();
}

double inner(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a.array() * b.array()).sum();
}

ProductStiefelPoint random_point(const ManifoldShape& shape,
                                 std::uint64_t seed) {
  shape.validate();
  Rng rng(seed);
  Eigen::MatrixXd R(shape.rows(), shape.rank);
  for (Eigen::Index i = 0; i < R.rows(); ++i) {
    for (Eigen::Index j = 0; j < R.cols(); ++j) R(i, j) = rng.normal();
  }
  for (int i = 0; i < shape.sphere_rows; ++i) {
    const double norm = R.row(i).norm();
    if (norm == 0.0) {
      R.row(i).setZero();
      R(i, 0) = 1.0;
    } else {
      R.row(i) /= norm;
    }
  }
  if (shape.bottom_rows > 0) {
    R.bottomRows(shape.bottom_rows) =
        orthonormal_rows(R.bottomRows(shape.bottom_rows));
  }
  return {std::move(R), shape};
}

ProductStiefelPoint lift(const ProductStiefelPoint& point, int rank) {
  if (rank < point.shape.rank) {
    throw InvalidInputError("lift cannot reduce the rank");
  }
  ProductStiefelPoint out{Eigen::MatrixXd::Zero(point.R.rows(), rank),
                          point.shape};
  out.R.leftCols(point.shape.rank) = point.R;
  out.shape.rank = rank;
  return out;
}

Eigen::MatrixXd project_tangent(const ProductStiefelPoint& point,
                                const Eigen::MatrixXd& ambient) {
  if (ambient.rows() != point.R.rows() || ambient.cols() != point.R.cols()) {
    throw InvalidInputError("ambient direction has the wrong shape");
  }
  return ambient -
         sym_block_diag_product(point.shape, ambient, point.R, point.R);
}

ProductStiefelPoint retract(const ProductStiefelPoint& point,
                            const Eigen::MatrixXd& tangent) {
  if (tangent.rows() != point.R.rows() || tangent.cols() != point.R.cols()) {
    throw InvalidInputError("tangent has the wrong shape");
  }
  ProductStiefelPoint out = point;
  for (int i = 0; i < point.shape.sphere_rows; ++i) {
    if (tangent.row(i).isZero(0.0)) continue;
    const Eigen::RowVectorXd row = point.R.row(i) + tangent.row(i);
    const double norm = row.norm();
    if (!(norm >= 1e-14)) {
      throw DegenerateStepError("retraction collapsed sphere row " +
                                std::to_string(i));
    }
    out.R.row(i) = row / norm;
  }
  const int k = point.shape.bottom_rows;
  if (k > 0 && !tangent.bottomRows(k).isZero(0.0)) {
    out.R.bottomRows(k) =
        polar_rows(point.R.bottomRows(k) + tangent.bottomRows(k));
  }
  return out;
}

double manifold_violation(const ProductStiefelPoint& point) {
  double worst = 0.0;
  for (int i = 0; i < point.shape.sphere_rows; ++i) {
    worst = std::max(worst, std::abs(point.R.row(i).norm() - 1.0));
  }
  const int k = point.shape.bottom_rows;
  if (k > 0) {
    const Eigen::MatrixXd B = point.R.bottomRows(k);
    worst = std::max(
        worst, (B * B.transpose() - Eigen::MatrixXd::Identity(k, k)).norm());
  }
  return worst;
}

double tangent_violation(const ProductStiefelPoint& point,
                         const Eigen::MatrixXd& V) {
  double worst = 0.0;
  for (int i = 0; i < point.shape.sphere_rows; ++i) {
    worst = std::max(worst, std::abs(point.R.row(i).dot(V.row(i))));
  }
  const int k = point.shape.bottom_rows;
  if (k > 0) {
    const Eigen::MatrixXd VB =
        V.bottomRows(k) * point.R.bottomRows(k).transpose();
    worst = std::max(worst, (VB + VB.transpose()).norm());
  }
  return worst;
}

Eigen::MatrixXd euclidean_gradient(const SymmetricCost& cost,
                                   const ProductStiefelPoint& point) {
  return 2.0 * cost.apply(point.R);
}

Eigen::MatrixXd riemannian_gradient(const SymmetricCost& cost,
                                    const ProductStiefelPoint& point) {
  return project_tangent(point, euclidean_gradient(cost, point));
}

Eigen::MatrixXd riemannian_hessian_vec(const SymmetricCost& cost,
                                       const ProductStiefelPoint& point,
                                       const Eigen::MatrixXd& egrad,
                                       const Eigen::MatrixXd& tangent) {
  const Eigen::MatrixXd ambient =
      2.0 * cost.apply(tangent) -
      sym_block_diag_product(point.shape, egrad, point.R, tangent);
  return project_tangent(point, ambient);
}

Eigen::MatrixXd riemannian_hessian_vec(const SymmetricCost& cost,
                                       const ProductStiefelPoint& point,
                                       const Eigen::MatrixXd& tangent) {
  return riemannian_hessian_vec(cost, point, euclidean_gradient(cost, point),
                                tangent);
}

}  // namespace mrfsdp
