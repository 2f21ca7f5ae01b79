#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mrfsdp/mrf.hpp"
#include "mrfsdp/runner.hpp"

namespace mrfsdp {

/// Gaps are percentages on the energy scale (offset restored). The raw_*
/// variants use the encoding's own scale, energy minus offset. Anything
/// that cannot be computed stays empty and a note says why.
struct MetricsReport {
  std::optional<double> f_opt;
  std::optional<double> percent_optimal_labels;
  std::optional<double> relaxation_gap_pct;
  std::optional<double> rounding_gap_pct;
  std::optional<double> raw_relaxation_gap_pct;
  std::optional<double> raw_rounding_gap_pct;
  std::optional<double> label_agreement_pct;
  std::map<std::string, double> timings;
  std::vector<std::string> notes;
};

struct ExactReference {
  Labeling labeling;
  double f_opt = 0.0;
};

/// Percentage of positions where the two labelings agree. Throws
/// InvalidInputError on a length mismatch.
double agreement_pct(const Labeling& a, const Labeling& b);

MetricsReport compute_metrics(const SolveResult& result,
                              const std::optional<ExactReference>& exact,
                              const std::optional<Labeling>& ground_truth);

/// Builds the exact reference from a result file, checking that both
/// results refer to the same instance.
ExactReference exact_reference_from(const SolveResult& exact,
                                    const SolveResult& result);

std::string serialize_metrics(const MetricsReport& report);

}  // namespace mrfsdp
