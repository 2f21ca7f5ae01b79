#include "mrfsdp/encoding.hpp"

#include <string>
#include <vector>

#include "mrfsdp/error.hpp"

namespace mrfsdp {

using Triplet = Eigen::Triplet<double>;

PmEncoding encode_pm(const MrfInstance& mrf) {
  PmEncoding enc;
  enc.num_nodes = mrf.num_nodes();
  enc.num_labels = mrf.num_labels();
  const int k = enc.num_labels;
  enc.dim = enc.num_nodes * k + 1;
  enc.rhs = 2.0 - k;
  const int last = enc.last();

  // Potts mismatch [xi != xj] = (K - xi'xj) / 4, split over both
  // orientations of the symmetric A; unary [xi != l] = (1 - e_l'xi) / 2.
  std::vector<Triplet> triplets;
  triplets.reserve(2 * k * mrf.binary_terms().size() +
                   2 * mrf.unary_terms().size());
  double offset = 0.0;
  for (const auto& e : mrf.binary_terms()) {
    const double entry = -e.weight / 8.0;
    for (int c = 0; c < k; ++c) {
      triplets.emplace_back(e.i * k + c, e.j * k + c, entry);
      triplets.emplace_back(e.j * k + c, e.i * k + c, entry);
    }
    offset += e.weight * k / 4.0;
  }
  for (const auto& t : mrf.unary_terms()) {
    const double entry = -t.weight / 4.0;
    triplets.emplace_back(t.node * k + t.label, last, entry);
    triplets.emplace_back(last, t.node * k + t.label, entry);
    offset += t.weight / 2.0;
  }
  enc.cost.resize(enc.dim, enc.dim);
  enc.cost.setFromTriplets(triplets.begin(), triplets.end());
  enc.cost.makeCompressed();
  enc.offset = offset;
  return enc;
}

Eigen::VectorXd labeling_to_pm(const Labeling& x, int num_nodes,
                               int num_labels) {
  if (static_cast<int>(x.size()) != num_nodes) {
    throw InvalidInputError("labeling length does not match node count");
  }
  Eigen::VectorXd y = Eigen::VectorXd::Constant(num_nodes * num_labels + 1, -1.0);
  for (int i = 0; i < num_nodes; ++i) {
    if (x[i] < 0 || x[i] >= num_labels) {
      throw InvalidInputError("label out of range: " + std::to_string(x[i]));
    }
    y(i * num_labels + x[i]) = 1.0;
  }
  y(y.size() - 1) = 1.0;
  return y;
}

Labeling pm_to_labeling(const Eigen::VectorXd& y, int num_labels) {
  if (num_labels < 2 || y.size() < 1 || (y.size() - 1) % num_labels != 0) {
    throw InvalidInputError("vector length is not N*K+1");
  }
  const int n = static_cast<int>((y.size() - 1) / num_labels);
  if (y(y.size() - 1) != 1.0) {
    throw InfeasibleError("homogenising entry must be +1");
  }
  Labeling x(n, -1);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < num_labels; ++c) {
      const double v = y(i * num_labels + c);
      if (v == 1.0) {
        if (x[i] >= 0) {
          throw InfeasibleError("node " + std::to_string(i) +
                                " has more than one +1 entry");
        }
        x[i] = c;
      } else if (v != -1.0) {
        throw InfeasibleError("entries must be exactly +1 or -1");
      }
    }
    if (x[i] < 0) {
      throw InfeasibleError("node " + std::to_string(i) + " has no +1 entry");
    }
  }
  return x;
}

double constraint_value(const PmEncoding& enc, int node,
                        const Eigen::MatrixXd& Y) {
  return Y.col(enc.last()).segment(enc.block_begin(node), enc.num_labels).sum();
}

double constraint_value_factor(const PmEncoding& enc, int node,
                               const Eigen::MatrixXd& R) {
  const Eigen::RowVectorXd block_sum =
      R.middleRows(enc.block_begin(node), enc.num_labels).colwise().sum();
  return block_sum.dot(R.row(enc.last()));
}

ZoEncoding encode_zo(const MrfInstance& mrf) {
  ZoEncoding enc;
  enc.num_nodes = mrf.num_nodes();
  enc.num_labels = mrf.num_labels();
  enc.dim = enc.num_nodes + enc.num_labels;
  const int n = enc.num_nodes;

  std::vector<Triplet> triplets;
  triplets.reserve(2 * mrf.binary_terms().size() + 2 * mrf.unary_terms().size());
  double offset = 0.0;
  // H_ij = H_ji = -w/2 so that trace(X'HX) = -sum_edges w [xi == xj].
  for (const auto& e : mrf.binary_terms()) {
    triplets.emplace_back(e.i, e.j, -e.weight / 2.0);
    triplets.emplace_back(e.j, e.i, -e.weight / 2.0);
    offset += e.weight;
  }
  // G_(i, l) = -w, stored as G/2 in both off-diagonal blocks of Q.
  for (const auto& t : mrf.unary_terms()) {
    triplets.emplace_back(t.node, n + t.label, -t.weight / 2.0);
    triplets.emplace_back(n + t.label, t.node, -t.weight / 2.0);
    offset += t.weight;
  }
  enc.cost.resize(enc.dim, enc.dim);
  enc.cost.setFromTriplets(triplets.begin(), triplets.end());
  enc.cost.makeCompressed();
  enc.offset = offset;
  return enc;
}

SparseMatrix ZoEncoding::h_block() const {
  return cost.topLeftCorner(num_nodes, num_nodes);
}

Eigen::MatrixXd ZoEncoding::g_block() const {
  return 2.0 * Eigen::MatrixXd(cost.topRightCorner(num_nodes, num_labels));
}

Eigen::MatrixXd labeling_to_zo(const Labeling& x, int num_nodes,
                               int num_labels) {
  if (static_cast<int>(x.size()) != num_nodes) {
    throw InvalidInputError("labeling length does not match node count");
  }
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(num_nodes, num_labels);
  for (int i = 0; i < num_nodes; ++i) {
    if (x[i] < 0 || x[i] >= num_labels) {
      throw InvalidInputError("label out of range: " + std::to_string(x[i]));
    }
    X(i, x[i]) = 1.0;
  }
  return X;
}

Labeling zo_to_labeling(const Eigen::MatrixXd& X) {
  Labeling x(X.rows(), -1);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index c = 0; c < X.cols(); ++c) {
      const double v = X(i, c);
      if (v == 1.0) {
        if (x[i] >= 0) {
          throw InfeasibleError("row " + std::to_string(i) +
                                " has more than one 1");
        }
        x[i] = static_cast<int>(c);
      } else if (v != 0.0) {
        throw InfeasibleError("entries must be exactly 0 or 1");
      }
    }
    if (x[i] < 0) {
      throw InfeasibleError("row " + std::to_string(i) + " has no 1");
    }
  }
  return x;
}

double zo_objective(const ZoEncoding& enc, const Eigen::MatrixXd& V) {
  if (V.rows() != enc.dim) {
    throw InvalidInputError("V must have N+K rows");
  }
  const Eigen::MatrixXd QV = enc.cost * V;
  return (V.array() * QV.array()).sum();
}

Eigen::MatrixXd homogenize(const Eigen::MatrixXd& X) {
  Eigen::MatrixXd V(X.rows() + X.cols(), X.cols());
  V.topRows(X.rows()) = X;
  V.bottomRows(X.cols()).setIdentity();
  return V;
}

}  // namespace mrfsdp
