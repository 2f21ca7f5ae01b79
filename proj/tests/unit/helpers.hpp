#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "mrfsdp/mrf.hpp"
#include "mrfsdp/random.hpp"

namespace testutil {

// Random instance with distinct (node,label) unaries and distinct edges.
inline mrfsdp::MrfInstance random_instance(int n, int k, int num_unary,
                                           int num_binary, std::uint64_t seed,
                                           bool nonnegative = true) {
  mrfsdp::Rng rng(seed);
  std::vector<mrfsdp::UnaryTerm> unary;
  std::vector<std::vector<bool>> used(n, std::vector<bool>(k, false));
  for (int t = 0; t < num_unary && t < n * k; ++t) {
    int node, label;
    do {
      node = static_cast<int>(rng.index(n));
      label = static_cast<int>(rng.index(k));
    } while (used[node][label]);
    used[node][label] = true;
    const double w = nonnegative ? rng.uniform(0.1, 2.0) : rng.uniform(-1.0, 2.0);
    unary.push_back({node, label, w});
  }
  std::vector<mrfsdp::BinaryTerm> binary;
  std::vector<std::vector<bool>> edge(n, std::vector<bool>(n, false));
  const int max_edges = n * (n - 1) / 2;
  for (int t = 0; t < num_binary && t < max_edges; ++t) {
    int i, j;
    do {
      i = static_cast<int>(rng.index(n));
      j = static_cast<int>(rng.index(n));
    } while (i == j || edge[i][j]);
    edge[i][j] = edge[j][i] = true;
    const double w = nonnegative ? rng.uniform(0.1, 1.5) : rng.uniform(-1.0, 1.5);
    binary.push_back({i, j, w});
  }
  return mrfsdp::MrfInstance(n, k, std::move(unary), std::move(binary));
}

// Odometer over all K^N labelings; returns false after the last one.
inline bool next_labeling(mrfsdp::Labeling& x, int k) {
  for (int i = static_cast<int>(x.size()) - 1; i >= 0; --i) {
    if (++x[i] < k) return true;
    x[i] = 0;
  }
  return false;
}

// Straight double-loop energy, written independently of the library.
inline double naive_energy(const mrfsdp::MrfInstance& mrf,
                           const mrfsdp::Labeling& x) {
  double e = 0.0;
  for (const auto& t : mrf.unary_terms()) {
    if (x[t.node] != t.label) e += t.weight;
  }
  for (const auto& b : mrf.binary_terms()) {
    if (x[b.i] != x[b.j]) e += b.weight;
  }
  return e;
}

inline mrfsdp::Labeling random_labeling(int n, int k, mrfsdp::Rng& rng) {
  mrfsdp::Labeling x(n);
  for (auto& v : x) v = static_cast<int>(rng.index(k));
  return x;
}

// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x,
                           const std::vector<double>& y) {
  double mx = 0, my = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace testutil
