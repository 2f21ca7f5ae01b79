#include "mrfsdp/fuses.hpp"

#include <chrono>

#include "mrfsdp/baselines.hpp"
#include "mrfsdp/error.hpp"
#include "mrfsdp/random.hpp"

namespace mrfsdp {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

ProductStiefelPoint fuses_initial_point(const Labeling& x, int num_labels,
                                        int rank, std::uint64_t seed,
                                        double perturbation) {
  const int n = static_cast<int>(x.size());
  const ManifoldShape shape{n, num_labels, rank};
  shape.validate();
  ProductStiefelPoint point{Eigen::MatrixXd::Zero(n + num_labels, rank),
                            shape};
  point.R.topLeftCorner(n, num_labels) = labeling_to_zo(x, n, num_labels);
  point.R.block(n, 0, num_labels, num_labels).setIdentity();
  if (perturbation <= 0.0) return point;

  Rng rng(seed);
  Eigen::MatrixXd dir(point.R.rows(), rank);
  for (Eigen::Index i = 0; i < dir.rows(); ++i) {
    for (Eigen::Index j = 0; j < rank; ++j) dir(i, j) = rng.normal();
  }
  dir = project_tangent(point, dir);
  const double norm = dir.norm();
  if (norm == 0.0) return point;
  return retract(point, (perturbation / norm) * dir);
}

Eigen::MatrixXd fuses_round(const ProductStiefelPoint& point, int num_nodes,
                            int num_labels) {
  if (point.R.rows() != num_nodes + num_labels) {
    throw InvalidInputError("factor does not have N+K rows");
  }
  const Eigen::MatrixXd scores =
      point.R.topRows(num_nodes) * point.R.bottomRows(num_labels).transpose();
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(num_nodes, num_labels);
  for (int i = 0; i < num_nodes; ++i) {
    int best = 0;
    for (int l = 1; l < num_labels; ++l) {
      if (scores(i, l) > scores(i, best)) best = l;
    }
    X(i, best) = 1.0;
  }
  return X;
}

FusesResult fuses_solve(const MrfInstance& mrf, const FusesOptions& options,
                        std::ostream* log) {
  const auto t0 = std::chrono::steady_clock::now();
  const ZoEncoding enc = encode_zo(mrf);
  const SymmetricCost cost(enc.cost);
  const int n = enc.num_nodes;
  const int k = enc.num_labels;
  const ManifoldShape base{n, k, k + 1};

  std::optional<ProductStiefelPoint> start;
  if (options.warm_start) {
    start = fuses_initial_point(unary_argmin(mrf), k, k + 1, options.seed);
  }
  const StaircaseResult sc = staircase_solve(cost, base, k + 1, options.params,
                                             start, options.seed, log);

  FusesResult res;
  res.solve_seconds = seconds_since(t0);
  const auto t1 = std::chrono::steady_clock::now();
  res.labeling = zo_to_labeling(fuses_round(sc.point, n, k));
  res.round_seconds = seconds_since(t1);

  res.offset = enc.offset;
  res.f_relaxed = sc.dual_bound + enc.offset;
  res.f_primal = sc.objective + enc.offset;
  res.f_rounded = energy(mrf, res.labeling);
  res.subopt_bound = res.f_rounded - res.f_relaxed;
  res.certified = sc.certified;
  res.rank_deficient = sc.rank_deficient;
  res.min_singular_value_ratio = sc.min_singular_value_ratio;
  res.min_eigenvalue = sc.min_eigenvalue;
  res.rank_history = sc.rank_history;
  res.point = sc.point;
  return res;
}

}  // namespace mrfsdp
