#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "mrfsdp/mrf.hpp"

namespace mrfsdp {

using SparseMatrix = Eigen::SparseMatrix<double>;

// ---------------------------------------------------------------------------
// +-1 vector encoding. Each node i owns the block [iK, iK+K) of a vector
// y in {-1,+1}^(NK+1) whose last entry is the homogenising +1; the block has
// a single +1 at the node's label. For every such y,
//   y' L y + offset == energy(mrf, x).
// ---------------------------------------------------------------------------

struct PmEncoding {
  int num_nodes = 0;
  int num_labels = 0;
  int dim = 1;  // NK + 1
  SparseMatrix cost;  // L = [A b; b' 0]
  double offset = 0.0;
  double rhs = 0.0;  // 2 - K, the per-node block-sum target

  int block_begin(int node) const { return node * num_labels; }
  int last() const { return dim - 1; }
};

PmEncoding encode_pm(const MrfInstance& mrf);

Eigen::VectorXd labeling_to_pm(const Labeling& x, int num_nodes,
                               int num_labels);

/// Throws InfeasibleError unless every block holds exactly one +1 and the
/// homogenising entry is +1.
Labeling pm_to_labeling(const Eigen::VectorXd& y, int num_labels);

/// trace(U_i Y): sum of Y[b, last] over the entries b of node i's block.
double constraint_value(const PmEncoding& enc, int node,
                        const Eigen::MatrixXd& Y);

/// Same quantity for Y = R R' without forming Y.
double constraint_value_factor(const PmEncoding& enc, int node,
                               const Eigen::MatrixXd& R);

// ---------------------------------------------------------------------------
// {0,1} matrix encoding. X is N x K one-hot, V = [X; I_K] and
//   trace(V' Q V) + offset == energy(mrf, x),  Q = [H G/2; G'/2 0].
// ---------------------------------------------------------------------------

struct ZoEncoding {
  int num_nodes = 0;
  int num_labels = 0;
  int dim = 0;  // N + K
  SparseMatrix cost;  // Q
  double offset = 0.0;

  /// N x N block H (edge couplings).
  SparseMatrix h_block() const;
  /// N x K block G (unary terms).
  Eigen::MatrixXd g_block() const;
};

ZoEncoding encode_zo(const MrfInstance& mrf);

Eigen::MatrixXd labeling_to_zo(const Labeling& x, int num_nodes,
                               int num_labels);

/// Throws InfeasibleError unless every row is a 0/1 indicator with exactly
/// one 1.
Labeling zo_to_labeling(const Eigen::MatrixXd& X);

/// trace(V' Q V) for any V with N+K rows.
double zo_objective(const ZoEncoding& enc, const Eigen::MatrixXd& V);

/// [X; I_K].
Eigen::MatrixXd homogenize(const Eigen::MatrixXd& X);

}  // namespace mrfsdp
