#include "mrfsdp/metrics.hpp"

#include "json.hpp"
#include "mrfsdp/error.hpp"

namespace mrfsdp {

namespace {

// 100 * numerator / reference, or empty with a note when reference is 0.
std::optional<double> gap_pct(double numerator, double reference,
                              std::vector<std::string>& notes,
                              const std::string& name) {
  if (reference == 0.0) {
    notes.push_back(name + " undefined: optimum is zero");
    return std::nullopt;
  }
  // Adding +0.0 turns -0.0 into 0.0.
  return 100.0 * numerator / reference + 0.0;
}

}  // namespace

double agreement_pct(const Labeling& a, const Labeling& b) {
  if (a.size() != b.size()) {
    throw InvalidInputError("labelings have different lengths");
  }
  if (a.empty()) return 100.0;
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.size(); ++i) same += a[i] == b[i];
  return 100.0 * static_cast<double>(same) / static_cast<double>(a.size());
}

ExactReference exact_reference_from(const SolveResult& exact,
                                    const SolveResult& result) {
  if (exact.method != Method::Exact) {
    throw InvalidInputError("reference result was not produced by the exact method");
  }
  if (exact.instance_fingerprint != result.instance_fingerprint) {
    throw InvalidInputError("results refer to different instances");
  }
  return {exact.labeling, exact.energy};
}

MetricsReport compute_metrics(const SolveResult& result,
                              const std::optional<ExactReference>& exact,
                              const std::optional<Labeling>& ground_truth) {
  MetricsReport m;
  m.timings = result.timings;
  if (exact) {
    m.f_opt = exact->f_opt;
    m.percent_optimal_labels = agreement_pct(result.labeling, exact->labeling);
    const double f = exact->f_opt;
    m.rounding_gap_pct =
        gap_pct(result.energy - f, f, m.notes, "rounding gap");
    if (result.f_relaxed) {
      m.relaxation_gap_pct =
          gap_pct(f - *result.f_relaxed, f, m.notes, "relaxation gap");
    } else {
      m.notes.push_back("relaxation gap unavailable: method has no relaxation");
    }
    if (result.offset) {
      const double raw = f - *result.offset;
      m.raw_rounding_gap_pct =
          gap_pct(result.energy - f, raw, m.notes, "raw rounding gap");
      if (result.f_relaxed) {
        m.raw_relaxation_gap_pct = gap_pct(f - *result.f_relaxed, raw, m.notes,
                                           "raw relaxation gap");
      }
    }
  } else {
    m.notes.push_back("no exact reference: optimality metrics unavailable");
  }
  if (ground_truth) {
    m.label_agreement_pct = agreement_pct(result.labeling, *ground_truth);
  }
  return m;
}

std::string serialize_metrics(const MetricsReport& r) {
  using json = nlohmann::ordered_json;
  auto opt = [](const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
  };
  json doc;
  doc["f_opt"] = opt(r.f_opt);
  doc["percent_optimal_labels"] = opt(r.percent_optimal_labels);
  doc["relaxation_gap_pct"] = opt(r.relaxation_gap_pct);
  doc["rounding_gap_pct"] = opt(r.rounding_gap_pct);
  doc["raw_relaxation_gap_pct"] = opt(r.raw_relaxation_gap_pct);
  doc["raw_rounding_gap_pct"] = opt(r.raw_rounding_gap_pct);
  doc["label_agreement_pct"] = opt(r.label_agreement_pct);
  doc["timings"] = r.timings;
  doc["notes"] = r.notes;
  return doc.dump(1) + "\n";
}

}  // namespace mrfsdp
