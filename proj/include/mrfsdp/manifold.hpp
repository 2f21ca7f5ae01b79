#pragma once

#include <cstdint>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace mrfsdp {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// St(1,r)^n x St(K,r): n unit-norm rows, optionally followed by a K x r
/// block with orthonormal rows.
struct ManifoldShape {
  int sphere_rows = 0;
  int bottom_rows = 0;
  int rank = 1;

  int rows() const { return sphere_rows + bottom_rows; }
  /// Throws InvalidInputError on rank < 1 or rank < bottom_rows.
  void validate() const;

  bool operator==(const ManifoldShape&) const = default;
};

struct ProductStiefelPoint {
  Eigen::MatrixXd R;
  ManifoldShape shape;
};

/// Sparse symmetric cost matrix M of f(R) = trace(M R R').
/// Construction rejects matrices that are not symmetric to 1e-12.
class SymmetricCost {
 public:
  explicit SymmetricCost(SparseMatrix m);

  const SparseMatrix& matrix() const noexcept { return m_; }
  int dim() const noexcept { return static_cast<int>(m_.rows()); }

  Eigen::MatrixXd apply(const Eigen::MatrixXd& R) const { return m_ * R; }
  double objective(const Eigen::MatrixXd& R) const;

 private:
  SparseMatrix m_;
};

double inner(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

ProductStiefelPoint random_point(const ManifoldShape& shape,
                                 std::uint64_t seed);

/// Appends zero columns up to `rank`. The result stays on the manifold.
ProductStiefelPoint lift(const ProductStiefelPoint& point, int rank);

/// Orthogonal projection of an ambient direction onto the tangent space.
Eigen::MatrixXd project_tangent(const ProductStiefelPoint& point,
                                const Eigen::MatrixXd& ambient);

/// Row normalisation for the sphere factors, polar factor for the Stiefel
/// block; both are second-order retractions. A zero tangent returns the
/// point unchanged. Throws DegenerateStepError if a sphere row or the block
/// collapses.
ProductStiefelPoint retract(const ProductStiefelPoint& point,
                            const Eigen::MatrixXd& tangent);

/// Worst violation of the unit-row and orthonormal-block constraints.
double manifold_violation(const ProductStiefelPoint& point);
/// Worst violation of the tangency conditions for V at point.
double tangent_violation(const ProductStiefelPoint& point,
                         const Eigen::MatrixXd& V);

Eigen::MatrixXd euclidean_gradient(const SymmetricCost& cost,
                                   const ProductStiefelPoint& point);

Eigen::MatrixXd riemannian_gradient(const SymmetricCost& cost,
                                    const ProductStiefelPoint& point);

/// Riemannian Hessian applied to a tangent vector, given the cached
/// Euclidean gradient 2MR at the point.
Eigen::MatrixXd riemannian_hessian_vec(const SymmetricCost& cost,
                                       const ProductStiefelPoint& point,
                                       const Eigen::MatrixXd& egrad,
                                       const Eigen::MatrixXd& tangent);

Eigen::MatrixXd riemannian_hessian_vec(const SymmetricCost& cost,
                                       const ProductStiefelPoint& point,
                                       const Eigen::MatrixXd& tangent);

}  // namespace mrfsdp
