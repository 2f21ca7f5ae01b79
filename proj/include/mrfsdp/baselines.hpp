#pragma once

#include <cstdint>

#include "mrfsdp/mrf.hpp"

namespace mrfsdp {

inline constexpr std::uint64_t kDefaultExactBudget = 20'000'000;

struct ExactResult {
  Labeling labeling;
  double f_opt = 0.0;
  std::uint64_t states_enumerated = 0;
};

/// Exhaustive search over all K^N labelings in lexicographic order; ties
/// resolve to the lexicographically smallest labeling. Throws
/// SizeRefusalError when K^N exceeds the budget.
ExactResult brute_force(const MrfInstance& mrf,
                        std::uint64_t budget = kDefaultExactBudget);

/// Exact minimisation by dynamic programming along the node order. The
/// state at step t is the labeling of the earlier nodes that still touch a
/// node >= t, so thin grids stored row-major along their short side are
/// cheap. Same tie-break as brute_force. Throws SizeRefusalError when the
/// table sizes summed over all steps exceed the budget.
ExactResult frontier_dp(const MrfInstance& mrf,
                        std::uint64_t budget = kDefaultExactBudget);

/// brute_force when it fits the budget, frontier_dp otherwise.
ExactResult exact_solve(const MrfInstance& mrf,
                        std::uint64_t budget = kDefaultExactBudget);

struct IcmResult {
  Labeling labeling;
  double energy = 0.0;
  int sweeps = 0;
  bool converged = false;  // last sweep changed nothing
};

/// Iterated conditional modes: nodes visited in index order, each moved to
/// its best label given its neighbours. A node only moves on a strict
/// improvement.
IcmResult icm(const MrfInstance& mrf, const Labeling& init,
              int max_sweeps = 100);

/// Per-node label with the smallest unary cost, lowest label on ties.
Labeling unary_argmin(const MrfInstance& mrf);

}  // namespace mrfsdp
