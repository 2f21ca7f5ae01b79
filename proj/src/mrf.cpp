#include "mrfsdp/mrf.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <string>
#include <utility>

#include "mrfsdp/error.hpp"
#include "mrfsdp/random.hpp"

namespace mrfsdp {

namespace {

void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidInputError(message);
}

}  // namespace

MrfInstance::MrfInstance(int num_nodes, int num_labels,
                         std::vector<UnaryTerm> unary,
                         std::vector<BinaryTerm> binary)
    : num_nodes_(num_nodes),
      num_labels_(num_labels),
      unary_(std::move(unary)),
      binary_(std::move(binary)) {
  require(num_nodes_ >= 1, "num_nodes must be positive");
  require(num_labels_ >= 2, "num_labels must be at least 2");

  std::set<std::pair<int, int>> seen_unary;
  for (const auto& t : unary_) {
    require(t.node >= 0 && t.node < num_nodes_,
            "unary node index out of range: " + std::to_string(t.node));
    require(t.label >= 0 && t.label < num_labels_,
            "unary label out of range: " + std::to_string(t.label));
    require(std::isfinite(t.weight), "unary weight must be finite");
    require(seen_unary.emplace(t.node, t.label).second,
            "duplicate unary term for node " + std::to_string(t.node) +
                " label " + std::to_string(t.label));
  }

  std::set<std::pair<int, int>> seen_edges;
  for (auto& e : binary_) {
    require(e.i >= 0 && e.i < num_nodes_ && e.j >= 0 && e.j < num_nodes_,
            "binary endpoint out of range");
    require(e.i != e.j, "binary term must join two distinct nodes");
    require(std::isfinite(e.weight), "binary weight must be finite");
    if (e.i > e.j) std::swap(e.i, e.j);
    require(seen_edges.emplace(e.i, e.j).second,
            "duplicate binary term (" + std::to_string(e.i) + "," +
                std::to_string(e.j) + ")");
  }
}

void MrfInstance::validate_labeling(const Labeling& x) const {
  if (static_cast<int>(x.size()) != num_nodes_) {
    throw InvalidInputError("labeling has " + std::to_string(x.size()) +
                            " entries, expected " +
                            std::to_string(num_nodes_));
  }
  for (int label : x) {
    if (label < 0 || label >= num_labels_) {
      throw InvalidInputError("label out of range: " + std::to_string(label));
    }
  }
}

double energy(const MrfInstance& mrf, const Labeling& x) {
  mrf.validate_labeling(x);
  double total = 0.0;
  for (const auto& t : mrf.unary_terms()) {
    if (x[t.node] != t.label) total += t.weight;
  }
  for (const auto& e : mrf.binary_terms()) {
    if (x[e.i] != x[e.j]) total += e.weight;
  }
  return total;
}

double binary_weight_from_features(std::span<const double> ci,
                                   std::span<const double> cj, double lambda1,
                                   double lambda2, double beta) {
  if (ci.size() != cj.size()) {
    throw InvalidInputError("feature vectors differ in length");
  }
  if (!(beta >= 0.0)) throw InvalidInputError("beta must be non-negative");
  double sq = 0.0;
  for (std::size_t k = 0; k < ci.size(); ++k) {
    const double d = ci[k] - cj[k];
    sq += d * d;
  }
  return lambda1 + lambda2 * std::exp(-beta * sq);
}

GeneratedInstance generate_grid_instance(const GridSpec& spec) {
  require(spec.rows >= 1 && spec.cols >= 1, "grid must have at least one cell");
  require(spec.num_labels >= 2, "num_labels must be at least 2");
  require(spec.unary_noise >= 0.0 && spec.unary_noise <= 1.0,
          "unary_noise must be a probability");
  require(std::isfinite(spec.unary_weight_min) &&
              std::isfinite(spec.unary_weight_max) &&
              spec.unary_weight_min <= spec.unary_weight_max,
          "unary weight range is empty or non-finite");
  const auto& bm = spec.binary;
  require(std::isfinite(bm.lambda1) && std::isfinite(bm.lambda2) &&
              std::isfinite(bm.beta) && std::isfinite(bm.color_noise) &&
              bm.color_noise >= 0.0,
          "binary weight model parameters must be finite");

  const int rows = spec.rows;
  const int cols = spec.cols;
  const int n = rows * cols;
  const int k = spec.num_labels;
  Rng rng(spec.seed);

  // Ground truth: random seeds grown into patches in random frontier order.
  Labeling truth(n, -1);
  const int num_patches = std::max(1, n / 10);
  std::vector<int> frontier;
  for (int p = 0; p < num_patches; ++p) {
    const int cell = static_cast<int>(rng.index(n));
    if (truth[cell] >= 0) continue;
    truth[cell] = static_cast<int>(rng.index(k));
    frontier.push_back(cell);
  }
  auto neighbours = [&](int cell) {
    std::array<int, 4> out{-1, -1, -1, -1};
    const int r = cell / cols;
    const int c = cell % cols;
    if (r > 0) out[0] = cell - cols;
    if (r + 1 < rows) out[1] = cell + cols;
    if (c > 0) out[2] = cell - 1;
    if (c + 1 < cols) out[3] = cell + 1;
    return out;
  };
  while (!frontier.empty()) {
    const std::size_t pick = rng.index(frontier.size());
    const int cell = frontier[pick];
    frontier[pick] = frontier.back();
    frontier.pop_back();
    for (int nb : neighbours(cell)) {
      if (nb >= 0 && truth[nb] < 0) {
        truth[nb] = truth[cell];
        frontier.push_back(nb);
      }
    }
  }

  std::vector<UnaryTerm> unary;
  unary.reserve(n);
  for (int i = 0; i < n; ++i) {
    int measured = truth[i];
    if (rng.uniform() < spec.unary_noise) {
      const int offset = 1 + static_cast<int>(rng.index(k - 1));
      measured = (truth[i] + offset) % k;
    }
    const double w = rng.uniform(spec.unary_weight_min, spec.unary_weight_max);
    unary.push_back({i, measured, w});
  }

  constexpr int kChannels = 3;
  std::vector<std::array<double, kChannels>> label_color(k);
  for (auto& color : label_color) {
    for (double& ch : color) ch = rng.uniform(0.0, 255.0);
  }
  std::vector<std::array<double, kChannels>> color(n);
  for (int i = 0; i < n; ++i) {
    for (int ch = 0; ch < kChannels; ++ch) {
      color[i][ch] = label_color[truth[i]][ch] + bm.color_noise * rng.normal();
    }
  }

  std::vector<std::pair<int, int>> edges;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int cell = r * cols + c;
      if (c + 1 < cols) edges.emplace_back(cell, cell + 1);
      if (r + 1 < rows) edges.emplace_back(cell, cell + cols);
    }
  }
  double beta = bm.beta;
  if (beta <= 0.0 && !edges.empty()) {
    double mean_sq = 0.0;
    for (auto [a, b] : edges) {
      for (int ch = 0; ch < kChannels; ++ch) {
        const double d = color[a][ch] - color[b][ch];
        mean_sq += d * d;
      }
    }
    mean_sq /= static_cast<double>(edges.size());
    beta = mean_sq > 0.0 ? 1.0 / (2.0 * mean_sq) : 0.0;
  }
  std::vector<BinaryTerm> binary;
  binary.reserve(edges.size());
  for (auto [a, b] : edges) {
    binary.push_back({a, b,
                      binary_weight_from_features(color[a], color[b],
                                                  bm.lambda1, bm.lambda2,
                                                  std::max(beta, 0.0))});
  }

  return {MrfInstance(n, k, std::move(unary), std::move(binary)),
          std::move(truth)};
}

}  // namespace mrfsdp
