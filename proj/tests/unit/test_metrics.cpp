#include <string>

#include "doctest.h"
#include "helpers.hpp"
#include "mrfsdp/baselines.hpp"
#include "mrfsdp/error.hpp"
#include "mrfsdp/io.hpp"
#include "mrfsdp/metrics.hpp"

using namespace mrfsdp;

namespace {

SolveResult fake(Method m, Labeling x, double e) {
  SolveResult r;
  r.method = m;
  r.instance_fingerprint = "0123456789abcdef";
  r.num_nodes = static_cast<int>(x.size());
  r.num_labels = 3;
  r.labeling = std::move(x);
  r.energy = e;
  return r;
}

}  // namespace

TEST_CASE("agreement percentage") {
  CHECK(agreement_pct({0, 1, 2, 2}, {0, 1, 1, 2}) == 75.0);
  CHECK(agreement_pct({}, {}) == 100.0);
  CHECK_THROWS_AS(agreement_pct({0}, {0, 1}), InvalidInputError);
}

TEST_CASE("a result compared with itself has zero gaps") {
  const SolveResult exact = fake(Method::Exact, {0, 1, 2, 0}, 4.0);
  const MetricsReport m =
      compute_metrics(exact, exact_reference_from(exact, exact), std::nullopt);
  CHECK(*m.percent_optimal_labels == 100.0);
  CHECK(*m.rounding_gap_pct == 0.0);
  CHECK_FALSE(m.relaxation_gap_pct);
  CHECK_FALSE(m.label_agreement_pct);
}

TEST_CASE("gap arithmetic") {
  SolveResult r = fake(Method::Fuses, {0, 1, 1, 0}, 5.0);
  r.f_relaxed = 3.5;
  r.offset = 10.0;
  const ExactReference ref{{0, 1, 2, 0}, 4.0};
  const MetricsReport m = compute_metrics(r, ref, Labeling{0, 0, 1, 0});
  CHECK(*m.f_opt == 4.0);
  CHECK(*m.percent_optimal_labels == 75.0);
  CHECK(*m.rounding_gap_pct == doctest::Approx(25.0));
  CHECK(*m.relaxation_gap_pct == doctest::Approx(12.5));
  // Encoding scale: f_opt - offset = -6.
  CHECK(*m.raw_rounding_gap_pct == doctest::Approx(100.0 * 1.0 / -6.0));
  CHECK(*m.raw_relaxation_gap_pct == doctest::Approx(100.0 * 0.5 / -6.0));
  CHECK(*m.label_agreement_pct == 75.0);
}

TEST_CASE("tight relaxation on a solved instance") {
  const MrfInstance mrf(3, 3, {{0, 2, 1.0}, {1, 0, 0.5}, {2, 1, 2.0}},
                        {{0, 1, 0.1}});
  const ExactResult ex = exact_solve(mrf);
  SolveResult r = fake(Method::Fuses, ex.labeling, ex.f_opt);
  r.f_relaxed = ex.f_opt;
  const MetricsReport m = compute_metrics(r, ExactReference{ex.labeling, ex.f_opt},
                                          std::nullopt);
  CHECK(*m.relaxation_gap_pct == 0.0);
  CHECK(*m.rounding_gap_pct == 0.0);
}

TEST_CASE("zero optimum leaves the gaps empty with a note") {
  SolveResult r = fake(Method::Fuses, {0, 0}, 0.0);
  r.f_relaxed = -0.1;
  const MetricsReport m = compute_metrics(r, ExactReference{{0, 0}, 0.0}, std::nullopt);
  CHECK_FALSE(m.rounding_gap_pct);
  CHECK_FALSE(m.relaxation_gap_pct);
  CHECK(m.notes.size() == 2);
  const std::string text = serialize_metrics(m);
  CHECK(text.find("\"rounding_gap_pct\": null") != std::string::npos);
}

TEST_CASE("no reference") {
  const MetricsReport m =
      compute_metrics(fake(Method::Icm, {0}, 1.0), std::nullopt, std::nullopt);
  CHECK_FALSE(m.f_opt);
  CHECK(m.notes.size() == 1);
}

TEST_CASE("reference mismatch") {
  const SolveResult exact = fake(Method::Exact, {0, 1}, 1.0);
  SolveResult other = fake(Method::Fuses, {0, 1}, 1.0);
  other.instance_fingerprint = "fedcba9876543210";
  CHECK_THROWS_AS(exact_reference_from(exact, other), InvalidInputError);
  const SolveResult not_exact = fake(Method::Icm, {0, 1}, 1.0);
  CHECK_THROWS_AS(exact_reference_from(not_exact, exact), InvalidInputError);
  CHECK_THROWS_AS(compute_metrics(exact, ExactReference{{0}, 1.0}, std::nullopt),
                  InvalidInputError);
}
