#include "mrfsdp/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "mrfsdp/error.hpp"

namespace mrfsdp {

namespace {

struct Neighbor {
  int node;
  double weight;
};

struct Graph {
  std::vector<std::vector<Neighbor>> adj;
  std::vector<std::vector<double>> unary;  // unary[i][l] = cost of label l

  explicit Graph(const MrfInstance& mrf)
      : adj(mrf.num_nodes()),
        unary(mrf.num_nodes(), std::vector<double>(mrf.num_labels(), 0.0)) {
    for (const auto& e : mrf.binary_terms()) {
      adj[e.i].push_back({e.j, e.weight});
      adj[e.j].push_back({e.i, e.weight});
    }
    for (const auto& t : mrf.unary_terms()) {
      for (int l = 0; l < mrf.num_labels(); ++l) {
        if (l != t.label) unary[t.node][l] += t.weight;
      }
    }
  }

  double local(int i, int label, const Labeling& x) const {
    double c = unary[i][label];
    for (const auto& nb : adj[i]) {
      if (x[nb.node] != label) c += nb.weight;
    }
    return c;
  }
};

// K^n, or budget + 1 once it is exceeded.
std::uint64_t capped_power(int k, int n, std::uint64_t budget) {
  std::uint64_t v = 1;
  for (int i = 0; i < n; ++i) {
    if (v > budget / static_cast<std::uint64_t>(k)) return budget + 1;
    v *= static_cast<std::uint64_t>(k);
  }
  return v;
}

}  // namespace

ExactResult brute_force(const MrfInstance& mrf, std::uint64_t budget) {
  const int n = mrf.num_nodes();
  const int k = mrf.num_labels();
  const std::uint64_t states = capped_power(k, n, budget);
  if (states > budget) {
    throw SizeRefusalError("brute force needs " + std::to_string(k) + "^" +
                           std::to_string(n) + " states, budget is " +
                           std::to_string(budget));
  }
  const Graph g(mrf);
  Labeling x(n, 0);
  double running = energy(mrf, x);
  ExactResult best{x, running, 1};

  auto change = [&](int i, int label) {
    running += g.local(i, label, x) - g.local(i, x[i], x);
    x[i] = label;
  };

  while (true) {
    int i = n - 1;
    while (i >= 0 && x[i] + 1 == k) {
      change(i, 0);
      --i;
    }
    if (i < 0) break;
    change(i, x[i] + 1);
    ++best.states_enumerated;
    if ((best.states_enumerated & 0xFFFF) == 0) running = energy(mrf, x);
    // The running value drifts by rounding; confirm candidates exactly.
    if (running < best.f_opt + 1e-9 * (1.0 + std::abs(best.f_opt))) {
      const double exact = energy(mrf, x);
      running = exact;
      if (exact < best.f_opt) {
        best.f_opt = exact;
        best.labeling = x;
      }
    }
  }
  return best;
}

ExactResult frontier_dp(const MrfInstance& mrf, std::uint64_t budget) {
  const int n = mrf.num_nodes();
  const int k = mrf.num_labels();
  const Graph g(mrf);

  std::vector<int> last_neighbor(n, -1);
  for (int j = 0; j < n; ++j) {
    for (const auto& nb : g.adj[j]) {
      last_neighbor[j] = std::max(last_neighbor[j], nb.node);
    }
  }
  // frontier[t]: nodes j < t with a neighbour >= t, increasing.
  std::vector<std::vector<int>> frontier(n + 1);
  std::uint64_t total = 0;
  for (int t = 0; t <= n; ++t) {
    for (int j = 0; j < t; ++j) {
      if (last_neighbor[j] >= t) frontier[t].push_back(j);
    }
    if (t < n) {
      const std::uint64_t size =
          capped_power(k, static_cast<int>(frontier[t].size()) + 1, budget);
      total += size;
      if (size > budget || total > budget) {
        throw SizeRefusalError("frontier of " +
                               std::to_string(frontier[t].size()) +
                               " nodes exceeds the state budget " +
                               std::to_string(budget));
      }
    }
  }

  auto pow_k = [k](std::size_t p) {
    std::uint64_t v = 1;
    for (std::size_t i = 0; i < p; ++i) v *= k;
    return v;
  };

  // value[t][s]: minimal cost of all terms touching nodes >= t given the
  // frontier labels encoded in s (digit p belongs to frontier[t][p]).
  std::vector<std::vector<double>> value(n + 1);
  value[n].assign(1, 0.0);
  std::vector<int> pos(n, -1);

  auto evaluate = [&](int t, const std::vector<int>& digits, int label) {
    for (std::size_t p = 0; p < frontier[t].size(); ++p) {
      pos[frontier[t][p]] = static_cast<int>(p);
    }
    double c = g.unary[t][label];
    for (const auto& nb : g.adj[t]) {
      if (nb.node < t && digits[pos[nb.node]] != label) c += nb.weight;
    }
    std::uint64_t next = 0;
    std::uint64_t scale = 1;
    for (int j : frontier[t + 1]) {
      const int d = j == t ? label : digits[pos[j]];
      next += scale * static_cast<std::uint64_t>(d);
      scale *= k;
    }
    return c + value[t + 1][next];
  };

  std::vector<int> digits;
  for (int t = n - 1; t >= 0; --t) {
    const std::size_t width = frontier[t].size();
    const std::uint64_t states = pow_k(width);
    value[t].assign(states, std::numeric_limits<double>::infinity());
    digits.assign(width, 0);
    for (std::uint64_t s = 0; s < states; ++s) {
      std::uint64_t rem = s;
      for (std::size_t p = 0; p < width; ++p) {
        digits[p] = static_cast<int>(rem % k);
        rem /= k;
      }
      double best = std::numeric_limits<double>::infinity();
      for (int l = 0; l < k; ++l) best = std::min(best, evaluate(t, digits, l));
      value[t][s] = best;
    }
  }

  ExactResult res;
  res.labeling.assign(n, 0);
  res.states_enumerated = total;
  for (int t = 0; t < n; ++t) {
    digits.clear();
    for (int j : frontier[t]) digits.push_back(res.labeling[j]);
    int best_label = 0;
    double best = evaluate(t, digits, 0);
    for (int l = 1; l < k; ++l) {
      const double c = evaluate(t, digits, l);
      if (c < best) {
        best = c;
        best_label = l;
      }
    }
    res.labeling[t] = best_label;
  }
  res.f_opt = energy(mrf, res.labeling);
  return res;
}

ExactResult exact_solve(const MrfInstance& mrf, std::uint64_t budget) {
  if (capped_power(mrf.num_labels(), mrf.num_nodes(), budget) <= budget) {
    return brute_force(mrf, budget);
  }
  return frontier_dp(mrf, budget);
}

IcmResult icm(const MrfInstance& mrf, const Labeling& init, int max_sweeps) {
  mrf.validate_labeling(init);
  if (max_sweeps < 1) throw InvalidInputError("max_sweeps must be positive");
  const Graph g(mrf);
  IcmResult res;
  res.labeling = init;
  Labeling& x = res.labeling;
  while (res.sweeps < max_sweeps) {
    ++res.sweeps;
    bool changed = false;
    for (int i = 0; i < mrf.num_nodes(); ++i) {
      double best = g.local(i, x[i], x);
      int best_label = x[i];
      for (int l = 0; l < mrf.num_labels(); ++l) {
        const double c = g.local(i, l, x);
        if (c < best) {
          best = c;
          best_label = l;
        }
      }
      if (best_label != x[i]) {
        x[i] = best_label;
        changed = true;
      }
    }
    if (!changed) {
      res.converged = true;
      break;
    }
  }
  res.energy = energy(mrf, x);
  return res;
}

Labeling unary_argmin(const MrfInstance& mrf) {
  const Graph g(mrf);
  Labeling x(mrf.num_nodes(), 0);
  for (int i = 0; i < mrf.num_nodes(); ++i) {
    const auto& c = g.unary[i];
    x[i] = static_cast<int>(std::min_element(c.begin(), c.end()) - c.begin());
  }
  return x;
}

}  // namespace mrfsdp
