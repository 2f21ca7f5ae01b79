#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mrfsdp/baselines.hpp"
#include "mrfsdp/dars.hpp"
#include "mrfsdp/mrf.hpp"
#include "mrfsdp/staircase.hpp"

namespace mrfsdp {

enum class Method { Fuses, Dars, Icm, Exact };

std::string to_string(Method m);
/// Throws InvalidInputError for anything but fuses, dars, icm or exact.
Method parse_method(std::string_view name);

struct RunConfig {
  Method method = Method::Fuses;
  SolverParams params = SolverParams::fuses_defaults();
  DualParams dual;
  std::uint64_t seed = 0;
  bool warm_start = false;  // fuses: start from the unary argmin
  int icm_max_sweeps = 100;
  std::uint64_t exact_budget = kDefaultExactBudget;

  /// Defaults for a method, with the method's own gradient tolerance.
  static RunConfig defaults_for(Method m);
  void validate() const;
  bool operator==(const RunConfig&) const;
};

struct SolveResult {
  Method method = Method::Fuses;
  std::string instance_fingerprint;
  int num_nodes = 0;
  int num_labels = 0;
  Labeling labeling;
  double energy = 0.0;  // f_rounded for the relaxations
  std::optional<double> f_relaxed;
  std::optional<double> f_primal;
  std::optional<double> offset;
  std::optional<double> subopt_bound;
  std::optional<bool> certified;
  std::optional<bool> converged;
  std::optional<bool> diverged;
  std::optional<int> dual_iterations;
  std::optional<double> constraint_residual_max;
  std::optional<double> min_eigenvalue;
  std::optional<bool> rank_deficient;
  std::optional<double> min_singular_value_ratio;
  std::optional<std::uint64_t> states_enumerated;
  std::optional<int> sweeps;
  std::vector<RankStep> rank_history;
  /// Wall-clock seconds per phase. The only non-reproducible part.
  std::map<std::string, double> timings;
  RunConfig config;

  bool operator==(const SolveResult&) const;
};

SolveResult run_solver(const MrfInstance& mrf, const RunConfig& config,
                       std::ostream* log = nullptr);

std::string serialize_result(const SolveResult& result);
/// Strict inverse of serialize_result.
SolveResult parse_result(std::string_view text);

/// Serialisation with the timings object removed, for reproducibility checks.
std::string serialize_result_without_timings(const SolveResult& result);

}  // namespace mrfsdp
