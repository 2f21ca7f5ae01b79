#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "helpers.hpp"
#include "mrfsdp/error.hpp"
#include "mrfsdp/io.hpp"
#include "mrfsdp/mrf.hpp"

using namespace mrfsdp;

TEST_CASE("energy of an instance without terms is zero") {
  const MrfInstance mrf(3, 2, {}, {});
  CHECK(energy(mrf, {0, 1, 1}) == 0.0);
  CHECK(energy(mrf, {1, 1, 1}) == 0.0);
}

TEST_CASE("single unary term by cases") {
  const MrfInstance mrf(1, 2, {{0, 0, 1.0}}, {});
  CHECK(energy(mrf, {0}) == 0.0);
  CHECK(energy(mrf, {1}) == 1.0);
}

TEST_CASE("energy matches the double-loop oracle") {
  const MrfInstance mrf = testutil::random_instance(6, 3, 8, 7, 11);
  REQUIRE(mrf.unary_terms().size() == 8);
  REQUIRE(mrf.binary_terms().size() == 7);
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    const Labeling x = testutil::random_labeling(6, 3, rng);
    CHECK(energy(mrf, x) == doctest::Approx(testutil::naive_energy(mrf, x)).epsilon(1e-15));
  }
}

TEST_CASE("energy rejects labelings that do not fit") {
  const MrfInstance mrf(2, 3, {{0, 1, 1.0}}, {{0, 1, 0.5}});
  CHECK_THROWS_AS(energy(mrf, {0}), InvalidInputError);
  CHECK_THROWS_AS(energy(mrf, {0, 3}), InvalidInputError);
  CHECK_THROWS_AS(energy(mrf, {-1, 0}), InvalidInputError);
}

TEST_CASE("instance invariants are enforced") {
  CHECK_THROWS_AS(MrfInstance(0, 2, {}, {}), InvalidInputError);
  CHECK_THROWS_AS(MrfInstance(2, 1, {}, {}), InvalidInputError);
  CHECK_THROWS_AS(MrfInstance(2, 2, {{2, 0, 1.0}}, {}), InvalidInputError);
  CHECK_THROWS_AS(MrfInstance(2, 2, {{0, 2, 1.0}}, {}), InvalidInputError);
  CHECK_THROWS_AS(MrfInstance(2, 2, {{0, 1, 1.0}, {0, 1, 2.0}}, {}),
                  InvalidInputError);
  CHECK_THROWS_AS(MrfInstance(2, 2, {{0, 1, NAN}}, {}), InvalidInputError);
  CHECK_THROWS_AS(MrfInstance(2, 2, {}, {{1, 1, 1.0}}), InvalidInputError);
  CHECK_THROWS_AS(MrfInstance(2, 2, {}, {{0, 2, 1.0}}), InvalidInputError);
  CHECK_THROWS_AS(MrfInstance(2, 2, {}, {{0, 1, 1.0}, {1, 0, 1.0}}),
                  InvalidInputError);
  CHECK_THROWS_AS(MrfInstance(2, 2, {}, {{0, 1, INFINITY}}), InvalidInputError);
  // Several unaries on one node and negative weights are allowed.
  CHECK_NOTHROW(MrfInstance(2, 3, {{0, 0, 1.0}, {0, 2, -0.5}}, {{0, 1, -1.0}}));
}

TEST_CASE("edges are stored with i < j") {
  const MrfInstance mrf(3, 2, {}, {{2, 0, 1.0}, {1, 2, 0.5}});
  for (const auto& e : mrf.binary_terms()) CHECK(e.i < e.j);
  CHECK(energy(mrf, {0, 0, 1}) == 1.5);
}

TEST_CASE("energy does not depend on term order") {
  const MrfInstance mrf = testutil::random_instance(5, 3, 9, 8, 3);
  auto unary = mrf.unary_terms();
  auto binary = mrf.binary_terms();
  std::reverse(unary.begin(), unary.end());
  std::rotate(binary.begin(), binary.begin() + 3, binary.end());
  const MrfInstance shuffled(5, 3, unary, binary);
  Rng rng(1);
  for (int t = 0; t < 30; ++t) {
    const Labeling x = testutil::random_labeling(5, 3, rng);
    CHECK(energy(shuffled, x) == doctest::Approx(energy(mrf, x)).epsilon(1e-14));
  }
}

TEST_CASE("relabeling both instance and labeling leaves energy unchanged") {
  const MrfInstance mrf = testutil::random_instance(5, 4, 10, 7, 9);
  const std::vector<int> perm = {2, 0, 3, 1};
  std::vector<UnaryTerm> unary = mrf.unary_terms();
  for (auto& t : unary) t.label = perm[t.label];
  const MrfInstance permuted(5, 4, unary, mrf.binary_terms());
  Rng rng(2);
  for (int t = 0; t < 30; ++t) {
    Labeling x = testutil::random_labeling(5, 4, rng);
    Labeling y = x;
    for (auto& v : y) v = perm[v];
    CHECK(energy(permuted, y) == doctest::Approx(energy(mrf, x)).epsilon(1e-14));
  }
}

TEST_CASE("non-negative weights give non-negative energy, zero at agreement") {
  const MrfInstance mrf(3, 3, {{0, 1, 1.0}, {1, 1, 2.0}, {2, 1, 0.5}},
                        {{0, 1, 1.0}, {1, 2, 1.0}});
  CHECK(energy(mrf, {1, 1, 1}) == 0.0);
  Labeling x(3, 0);
  do {
    CHECK(energy(mrf, x) >= 0.0);
  } while (testutil::next_labeling(x, 3));
}

TEST_CASE("binary weight from features") {
  const std::vector<double> c = {10.0, 20.0, 30.0};
  CHECK(binary_weight_from_features(c, c, 0.02, 0.04, 0.5) ==
        doctest::Approx(0.06).epsilon(1e-15));
  const std::vector<double> far = {200.0, -40.0, 3.0};
  CHECK(binary_weight_from_features(c, far, 0.02, 0.0, 0.1) == 0.02);
  // |ci - cj|^2 = 10^2 + 30^2 = 1000 exactly.
  const std::vector<double> a = {0.0, 0.0, 5.0};
  const std::vector<double> b = {10.0, 30.0, 5.0};
  const long double oracle = 0.02L + 0.04L * std::exp(-0.000173L * 1000.0L);
  CHECK(binary_weight_from_features(a, b, 0.02, 0.04, 0.000173) ==
        doctest::Approx(static_cast<double>(oracle)).epsilon(1e-15));
  const std::vector<double> shorter = {1.0, 2.0};
  CHECK_THROWS_AS(binary_weight_from_features(a, shorter, 0.02, 0.04, 0.1),
                  InvalidInputError);
  CHECK_THROWS_AS(binary_weight_from_features(a, b, 0.02, 0.04, -1.0),
                  InvalidInputError);
}

TEST_CASE("grid generator shapes") {
  GridSpec spec;
  spec.rows = 1;
  spec.cols = 1;
  spec.num_labels = 4;
  GeneratedInstance g = generate_grid_instance(spec);
  CHECK(g.mrf.num_nodes() == 1);
  CHECK(g.mrf.binary_terms().empty());
  CHECK(g.mrf.unary_terms().size() == 1);

  spec.rows = 2;
  spec.cols = 2;
  CHECK(generate_grid_instance(spec).mrf.binary_terms().size() == 4);

  spec.rows = 4;
  spec.cols = 4;
  g = generate_grid_instance(spec);
  CHECK(g.mrf.binary_terms().size() == 24);
  CHECK(g.mrf.unary_terms().size() == 16);
  CHECK(g.ground_truth.size() == 16);
  for (const auto& e : g.mrf.binary_terms()) {
    const int ri = e.i / 4, ci = e.i % 4, rj = e.j / 4, cj = e.j % 4;
    CHECK(std::abs(ri - rj) + std::abs(ci - cj) == 1);
  }
}

TEST_CASE("grid generator is deterministic per seed") {
  GridSpec spec;
  spec.seed = 7;
  spec.unary_noise = 0.3;
  const std::string a = serialize_instance(generate_grid_instance(spec).mrf);
  const std::string b = serialize_instance(generate_grid_instance(spec).mrf);
  CHECK(a == b);
  spec.seed = 8;
  CHECK(serialize_instance(generate_grid_instance(spec).mrf) != a);
}

TEST_CASE("grid generator noise and weights follow the grid settings") {
  GridSpec spec;
  spec.rows = 60;
  spec.cols = 60;
  spec.num_labels = 5;
  spec.unary_noise = 0.3;
  spec.unary_weight_min = 0.5;
  spec.unary_weight_max = 1.5;
  spec.seed = 3;
  const GeneratedInstance g = generate_grid_instance(spec);
  int wrong = 0;
  for (const auto& t : g.mrf.unary_terms()) {
    wrong += t.label != g.ground_truth[t.node];
    CHECK(t.weight >= 0.5);
    CHECK(t.weight < 1.5);
  }
  // 3600 Bernoulli(0.3) draws: 5 standard deviations is about 0.038.
  CHECK(std::abs(wrong / 3600.0 - 0.3) < 0.04);
  for (const auto& e : g.mrf.binary_terms()) {
    CHECK(e.weight >= spec.binary.lambda1);
    CHECK(e.weight <= spec.binary.lambda1 + spec.binary.lambda2);
  }
}

TEST_CASE("grid generator rejects bad parameters") {
  GridSpec spec;
  spec.unary_noise = 1.5;
  CHECK_THROWS_AS(generate_grid_instance(spec), InvalidInputError);
  spec.unary_noise = 0.2;
  spec.unary_weight_min = 2.0;
  spec.unary_weight_max = 1.0;
  CHECK_THROWS_AS(generate_grid_instance(spec), InvalidInputError);
  spec = GridSpec{};
  spec.rows = 0;
  CHECK_THROWS_AS(generate_grid_instance(spec), InvalidInputError);
}
