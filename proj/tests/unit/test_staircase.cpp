#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "helpers.hpp"
#include "mrfsdp/encoding.hpp"
#include "mrfsdp/error.hpp"
#include "mrfsdp/staircase.hpp"

using namespace mrfsdp;

namespace {

SparseMatrix random_symmetric(int dim, double density, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) {
      if (rng.uniform() < density) {
        const double v = rng.normal();
        t.emplace_back(i, j, v);
        if (i != j) t.emplace_back(j, i, v);
      }
    }
  }
  SparseMatrix m(dim, dim);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

double field(const std::string& line, const std::string& key) {
  const auto at = line.find(" " + key + "=");
  REQUIRE(at != std::string::npos);
  return std::stod(line.substr(at + key.size() + 2));
}

}  // namespace

TEST_CASE("default solver parameters") {
  const SolverParams f = SolverParams::fuses_defaults();
  CHECK(f.grad_norm_tol == 1e-2);
  CHECK(f.eig_tol == 1e-2);
  CHECK(f.rel_func_decrease_tol == 1e-5);
  CHECK(f.max_tnt_iterations == 500);
  CHECK(f.initial_tr_radius == 1.0);
  CHECK(f.tr_decrease_factor == 0.25);
  CHECK(f.tr_increase_factor == 2.5);
  CHECK(f.max_cg_iterations == 2000);
  CHECK(f.cg_success_eta == 0.9);
  CHECK(SolverParams::dars_defaults().grad_norm_tol == 1e-3);

  SolverParams bad = f;
  bad.tr_decrease_factor = 1.5;
  CHECK_THROWS_AS(bad.validate(), InvalidInputError);
  bad = f;
  bad.cg_success_eta = 1.0;
  CHECK_THROWS_AS(bad.validate(), InvalidInputError);
  bad = f;
  bad.grad_norm_tol = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidInputError);
}

TEST_CASE("tnt on a constant objective does not move") {
  const ManifoldShape shape{5, 2, 3};
  const SymmetricCost zero(SparseMatrix(7, 7));
  const ProductStiefelPoint p = random_point(shape, 1);
  const TntResult r = tnt_minimize(zero, p, SolverParams{});
  CHECK(r.point.R == p.R);
  CHECK(r.iterations == 0);
  CHECK(r.grad_norm == 0.0);
  CHECK(r.stop == TntStop::GradientNorm);
}

TEST_CASE("tnt with a diagonal cost on rank-one spheres") {
  SparseMatrix m(4, 4);
  m.insert(0, 0) = -1.0;
  m.insert(1, 1) = -2.0;
  m.insert(2, 2) = -3.0;
  m.insert(3, 3) = -4.5;
  const SymmetricCost cost(m);
  const TntResult r = tnt_minimize(cost, random_point({4, 0, 1}, 3), SolverParams{});
  CHECK(r.grad_norm < 1e-2);
  CHECK(r.objective == doctest::Approx(-10.5).epsilon(1e-14));
}

TEST_CASE("tnt reaches the gradient tolerance on a FUSES problem") {
  GridSpec spec;
  spec.rows = 5;
  spec.cols = 5;
  spec.num_labels = 4;
  spec.seed = 2;
  const ZoEncoding enc = encode_zo(generate_grid_instance(spec).mrf);
  const SymmetricCost cost(enc.cost);
  std::ostringstream log;
  const ProductStiefelPoint p0 = random_point({25, 4, 5}, 4);
  const TntResult r = tnt_minimize(cost, p0, SolverParams::fuses_defaults(), &log);
  CHECK(r.grad_norm < 1e-2);
  CHECK(r.objective == doctest::Approx(cost.objective(r.point.R)).epsilon(1e-12));
  CHECK(manifold_violation(r.point) < 1e-10);

  // Every accepted step strictly lowers the objective.
  std::istringstream lines(log.str());
  std::string line;
  double prev = cost.objective(p0.R);
  int accepted = 0;
  while (std::getline(lines, line)) {
    if (line.rfind("tnt ", 0) != 0) continue;
    CHECK(line.find(" radius=") != std::string::npos);
    if (field(line, "accepted") == 1.0) {
      const double f = field(line, "f");
      CHECK(f < prev + 1e-12);
      prev = f;
      ++accepted;
    }
  }
  CHECK(accepted == r.accepted_steps);
  CHECK(accepted > 0);
}

TEST_CASE("tnt reports a non-finite objective") {
  SparseMatrix m(2, 2);
  m.insert(0, 0) = 1e308;
  m.insert(0, 1) = 1e308;
  m.insert(1, 0) = 1e308;
  m.insert(1, 1) = 1e308;
  const SymmetricCost cost(m);
  ProductStiefelPoint p = random_point({2, 0, 2}, 1);
  p.R.row(1) = p.R.row(0);
  CHECK_THROWS_AS(tnt_minimize(cost, p, SolverParams{}), NumericalFailureError);
}

TEST_CASE("rank deficiency check") {
  Eigen::MatrixXd R(4, 3);
  R << 1, 0, 0, 0, 1, 0, 0.6, 0.8, 0, 1, 0, 0;
  RankCheck rc = check_rank_deficiency({R, {4, 0, 3}}, 1e-2);
  CHECK(rc.deficient);
  CHECK(rc.ratio == 0.0);
  REQUIRE(rc.null_direction);
  CHECK((R * *rc.null_direction).norm() < 1e-12);

  const ProductStiefelPoint one = random_point({6, 0, 1}, 2);
  rc = check_rank_deficiency(one, 1e-2);
  CHECK_FALSE(rc.deficient);
  CHECK(rc.ratio == 1.0);

  Rng rng(3);
  Eigen::MatrixXd A(20, 3), B(3, 4);
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 3; ++j) A(i, j) = rng.normal();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j) B(i, j) = rng.normal();
  const Eigen::MatrixXd low = A * B;
  rc = check_rank_deficiency({low, {20, 0, 4}}, 1e-2);
  CHECK(rc.deficient);
  CHECK(rc.ratio < 1e-12);
  REQUIRE(rc.null_direction);
  CHECK((low * *rc.null_direction).norm() < 1e-10 * low.norm());
}

TEST_CASE("lanczos finds the smallest eigenvalue") {
  const SparseMatrix m = random_symmetric(700, 0.01, 5);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> dense((Eigen::MatrixXd(m)));
  const EigenPair e = lanczos_smallest(
      [&](const Eigen::VectorXd& x) { return Eigen::VectorXd(m * x); }, 700, 1);
  CHECK(e.value == doctest::Approx(dense.eigenvalues()(0)).epsilon(1e-8));
  CHECK(e.residual < 1e-6);
  CHECK(std::abs(e.vector.norm() - 1.0) < 1e-12);
}

TEST_CASE("certificate eigenvalue is invariant between dense and Lanczos") {
  const SymmetricCost cost(random_symmetric(40, 0.2, 8));
  const ProductStiefelPoint p = random_point({37, 3, 4}, 2);
  const EigenPair dense = certificate_min_eigen(cost, p, 1);
  // Rebuild S = M - Lambda(R) independently.
  const Eigen::MatrixXd M(cost.matrix());
  const Eigen::MatrixXd MR = M * p.R;
  Eigen::MatrixXd S = M;
  for (int i = 0; i < 37; ++i) S(i, i) -= MR.row(i).dot(p.R.row(i));
  const Eigen::MatrixXd P = MR.bottomRows(3) * p.R.bottomRows(3).transpose();
  S.bottomRightCorner(3, 3) -= 0.5 * (P + P.transpose());
  const EigenPair lz = lanczos_smallest(
      [&](const Eigen::VectorXd& x) { return Eigen::VectorXd(S * x); }, 40, 3);
  CHECK(dense.value == doctest::Approx(lz.value).epsilon(1e-9));
}

TEST_CASE("staircase on a unary-only FUSES problem certifies at the first rank") {
  const MrfInstance mrf(4, 3, {{0, 2, 1.0}, {1, 0, 0.7}, {2, 1, 1.3}, {3, 2, 0.4}}, {});
  const ZoEncoding enc = encode_zo(mrf);
  const StaircaseResult r = staircase_solve(SymmetricCost(enc.cost), {4, 3, 4}, 4,
                                            SolverParams::fuses_defaults(),
                                            std::nullopt, 7);
  CHECK(r.certified);
  REQUIRE(r.rank_history.size() == 1);
  CHECK(r.rank_history[0].rank == 4);
  CHECK(r.dual_bound <= r.objective + 1e-12);
  CHECK(r.objective + enc.offset == doctest::Approx(0.0).epsilon(1e-3).scale(1.0));
}

TEST_CASE("staircase escapes saddles by climbing in rank") {
  // Max-cut style problem: rank one is a discrete set, so the first rank
  // cannot be certified and the staircase has to climb.
  const SymmetricCost cost(random_symmetric(30, 0.3, 12));
  SolverParams params;
  params.grad_norm_tol = 1e-6;
  params.eig_tol = 1e-6;
  params.max_staircase_steps = 30;
  std::ostringstream log;
  const StaircaseResult r =
      staircase_solve(cost, {30, 0, 1}, 1, params, std::nullopt, 3, &log);
  REQUIRE(r.rank_history.size() >= 2);
  for (std::size_t i = 1; i < r.rank_history.size(); ++i) {
    CHECK(r.rank_history[i].rank == r.rank_history[i - 1].rank + 1);
    CHECK(r.rank_history[i].objective < r.rank_history[i - 1].objective);
  }
  CHECK(r.certified);
  CHECK(r.min_eigenvalue >= -1e-6);
  CHECK(r.objective - r.dual_bound <= 30 * 2e-6);
  CHECK(log.str().find("staircase rank=1 ") != std::string::npos);
}

TEST_CASE("staircase warm start keeps the manifold shape") {
  const SymmetricCost cost(random_symmetric(12, 0.4, 2));
  const ProductStiefelPoint wrong = random_point({10, 2, 3}, 1);
  CHECK_THROWS_AS(staircase_solve(cost, {12, 0, 2}, 2, SolverParams{}, wrong, 1),
                  InvalidInputError);
  const ProductStiefelPoint warm = random_point({12, 0, 4}, 1);
  const StaircaseResult r =
      staircase_solve(cost, {12, 0, 2}, 2, SolverParams{}, warm, 1);
  CHECK(r.rank_history.front().rank == 4);
}
