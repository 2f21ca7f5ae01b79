#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace mrfsdp {

/// Label per node, 0-based.
using Labeling = std::vector<int>;

/// Potts unary term: costs `weight` unless the node takes `label`.
struct UnaryTerm {
  int node = 0;
  int label = 0;
  double weight = 0.0;

  bool operator==(const UnaryTerm&) const = default;
};

/// Potts binary term: costs `weight` when the two endpoints disagree.
struct BinaryTerm {
  int i = 0;
  int j = 0;
  double weight = 0.0;

  bool operator==(const BinaryTerm&) const = default;
};

/// A pairwise Potts MRF. Immutable once constructed; the constructor
/// validates every invariant and stores each edge with i < j.
class MrfInstance {
 public:
  MrfInstance(int num_nodes, int num_labels, std::vector<UnaryTerm> unary,
              std::vector<BinaryTerm> binary);

  int num_nodes() const noexcept { return num_nodes_; }
  int num_labels() const noexcept { return num_labels_; }
  const std::vector<UnaryTerm>& unary_terms() const noexcept { return unary_; }
  const std::vector<BinaryTerm>& binary_terms() const noexcept {
    return binary_;
  }

  /// Throws InvalidInputError if x does not fit this instance.
  void validate_labeling(const Labeling& x) const;

  bool operator==(const MrfInstance&) const = default;

 private:
  int num_nodes_;
  int num_labels_;
  std::vector<UnaryTerm> unary_;
  std::vector<BinaryTerm> binary_;
};

/// Discrete Potts energy of labeling x.
double energy(const MrfInstance& mrf, const Labeling& x);

/// lambda1 + lambda2 * exp(-beta * |ci - cj|^2).
double binary_weight_from_features(std::span<const double> ci,
                                   std::span<const double> cj, double lambda1,
                                   double lambda2, double beta);

/// Binary weights follow binary_weight_from_features applied to synthetic
/// per-node colour features (label mean colour plus Gaussian noise).
/// A non-positive beta selects beta = 1 / (2 * mean squared colour distance).
struct BinaryWeightModel {
  double lambda1 = 0.15;
  double lambda2 = 0.35;
  double beta = 0.0;
  double color_noise = 30.0;
};

struct GridSpec {
  int rows = 4;
  int cols = 4;
  int num_labels = 3;
  double unary_noise = 0.3;
  double unary_weight_min = 0.5;
  double unary_weight_max = 1.5;
  BinaryWeightModel binary;
  std::uint64_t seed = 0;
};

struct GeneratedInstance {
  MrfInstance mrf;
  Labeling ground_truth;
};

/// 4-connected grid instance with a smooth patchwork ground truth and one
/// noisy unary measurement per node. Deterministic for a fixed seed.
GeneratedInstance generate_grid_instance(const GridSpec& spec);

}  // namespace mrfsdp
