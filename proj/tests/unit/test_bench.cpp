#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "mrfsdp/bench.hpp"
#include "mrfsdp/error.hpp"

using namespace mrfsdp;

namespace {

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

BenchSpec small_spec() {
  BenchSpec spec;
  spec.grids = {{2, 2}, {3, 3}};
  spec.labels = {2, 3};
  spec.seeds = {0, 1};
  spec.methods = {Method::Fuses, Method::Icm};
  return spec;
}

}  // namespace

TEST_CASE("grid list parsing") {
  using G = std::vector<std::pair<int, int>>;
  CHECK(parse_grid_list("4x4,6x8") == G{{4, 4}, {6, 8}});
  CHECK(parse_grid_list("5") == G{{5, 5}});
  CHECK_THROWS_AS(parse_grid_list("4x"), InvalidInputError);
  CHECK_THROWS_AS(parse_grid_list(""), InvalidInputError);
  CHECK_THROWS_AS(parse_grid_list("0x3"), InvalidInputError);
}

TEST_CASE("bench covers every cell and writes one row per group") {
  const BenchReport r = run_bench(small_spec());
  REQUIRE(r.cells.size() == 2 * 2 * 2 * 2);
  for (const BenchCell& c : r.cells) {
    CHECK(c.ok);
    REQUIRE(c.metrics.f_opt);
    CHECK(*c.metrics.rounding_gap_pct >= -1e-9);
    if (c.method == Method::Fuses) CHECK(*c.metrics.relaxation_gap_pct >= -1e-9);
  }
  // Header plus one row per (method, N, K).
  CHECK(lines(r.table_csv).size() == 1 + 2 * 2 * 2);
  CHECK(lines(r.gap_vs_n_csv).size() == 1 + 2 * 2);
  CHECK(lines(r.gap_vs_k_csv).size() == 1 + 2 * 2);
  std::set<std::string> sizes;
  for (std::size_t i = 1; i < lines(r.gap_vs_n_csv).size(); ++i) {
    const std::string l = lines(r.gap_vs_n_csv)[i];
    sizes.insert(l.substr(0, l.find(',', l.find(',') + 1)));
  }
  CHECK(sizes.size() == 4);
}

TEST_CASE("bench output does not depend on the thread count") {
  BenchSpec one = small_spec();
  BenchSpec many = small_spec();
  many.threads = 3;
  const BenchReport a = run_bench(one);
  const BenchReport b = run_bench(many);
  REQUIRE(a.cells.size() == b.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    CHECK(a.cells[i].result.labeling == b.cells[i].result.labeling);
  }
  CHECK(lines(a.gap_vs_n_csv) == lines(b.gap_vs_n_csv));
}

TEST_CASE("a failing cell is recorded and the run continues") {
  BenchSpec spec = small_spec();
  spec.grids = {{2, 2}};
  spec.labels = {2};
  spec.seeds = {0};
  spec.methods = {Method::Exact, Method::Icm};
  spec.exact_budget = 2;
  const BenchReport r = run_bench(spec);
  REQUIRE(r.cells.size() == 2);
  CHECK_FALSE(r.cells[0].ok);
  CHECK(r.cells[0].error.find("budget") != std::string::npos);
  CHECK(r.cells[1].ok);
}
