#include "mrfsdp/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <tuple>
#include <sstream>
#include <thread>

#include "mrfsdp/error.hpp"

namespace mrfsdp {

namespace {

struct Stats {
  std::vector<double> values;

  void add(const std::optional<double>& v) {
    if (v) values.push_back(*v);
  }
  double mean() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
  }
  double stddev() const {
    if (values.size() < 2) return 0.0;
    const double m = mean();
    double s = 0.0;
    for (double v : values) s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(values.size() - 1));
  }
  double median() const {
    std::vector<double> v = values;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(8);
  os << v;
  return os.str();
}

void write_mean_std(std::ostream& os, const Stats& s) {
  if (s.values.empty()) {
    os << ",,";
  } else {
    os << "," << fmt(s.mean()) << "," << fmt(s.stddev());
  }
}

void write_median(std::ostream& os, const Stats& s) {
  os << ",";
  if (!s.values.empty()) os << fmt(s.median());
}

struct Group {
  int runs = 0;
  int failures = 0;
  int certified = 0;
  Stats rounding, relaxation, optimal, agreement, time_ms;
};

void accumulate(Group& g, const BenchCell& c) {
  ++g.runs;
  if (!c.ok) {
    ++g.failures;
    return;
  }
  if (c.result.certified.value_or(false)) ++g.certified;
  g.rounding.add(c.metrics.rounding_gap_pct);
  g.relaxation.add(c.metrics.relaxation_gap_pct);
  g.optimal.add(c.metrics.percent_optimal_labels);
  g.agreement.add(c.metrics.label_agreement_pct);
  auto it = c.result.timings.find("total");
  if (it != c.result.timings.end()) g.time_ms.add(1000.0 * it->second);
}

}  // namespace

std::vector<std::pair<int, int>> parse_grid_list(const std::string& text) {
  std::vector<std::pair<int, int>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      const auto x = item.find('x');
      std::size_t used = 0;
      if (x == std::string::npos) {
        const int n = std::stoi(item, &used);
        if (used != item.size()) throw std::invalid_argument(item);
        out.emplace_back(n, n);
      } else {
        const std::string a = item.substr(0, x);
        const std::string b = item.substr(x + 1);
        std::size_t ua = 0, ub = 0;
        const int r = std::stoi(a, &ua);
        const int c = std::stoi(b, &ub);
        if (ua != a.size() || ub != b.size()) throw std::invalid_argument(item);
        out.emplace_back(r, c);
      }
    } catch (const std::logic_error&) {
      throw InvalidInputError("bad grid size '" + item + "'");
    }
    if (out.back().first < 1 || out.back().second < 1) {
      throw InvalidInputError("grid sizes must be positive");
    }
  }
  if (out.empty()) throw InvalidInputError("no grid sizes given");
  return out;
}

BenchReport run_bench(const BenchSpec& spec) {
  if (spec.grids.empty() || spec.labels.empty() || spec.seeds.empty() ||
      spec.methods.empty()) {
    throw InvalidInputError("bench needs grids, labels, seeds and methods");
  }
  struct Instance {
    int rows, cols, k;
    std::uint64_t seed;
  };
  std::vector<Instance> instances;
  for (const auto& [rows, cols] : spec.grids) {
    for (int k : spec.labels) {
      for (std::uint64_t seed : spec.seeds) instances.push_back({rows, cols, k, seed});
    }
  }

  BenchReport report;
  const std::size_t m = spec.methods.size();
  report.cells.resize(instances.size() * m);
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    while (true) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= instances.size()) return;
      const Instance& in = instances[idx];
      GridSpec gs = spec.instance;
      gs.rows = in.rows;
      gs.cols = in.cols;
      gs.num_labels = in.k;
      gs.seed = in.seed;
      for (std::size_t j = 0; j < m; ++j) {
        BenchCell& c = report.cells[idx * m + j];
        c.method = spec.methods[j];
        c.rows = in.rows;
        c.cols = in.cols;
        c.num_labels = in.k;
        c.seed = in.seed;
      }
      std::optional<GeneratedInstance> gen;
      try {
        gen.emplace(generate_grid_instance(gs));
      } catch (const std::exception& e) {
        for (std::size_t j = 0; j < m; ++j) {
          report.cells[idx * m + j].error = e.what();
        }
        continue;
      }
      std::optional<ExactReference> exact;
      try {
        const ExactResult e = exact_solve(gen->mrf, spec.exact_budget);
        exact = ExactReference{e.labeling, e.f_opt};
      } catch (const SizeRefusalError&) {
      }
      for (std::size_t j = 0; j < m; ++j) {
        BenchCell& c = report.cells[idx * m + j];
        try {
          RunConfig cfg = RunConfig::defaults_for(c.method);
          if (spec.params) cfg.params = *spec.params;
          cfg.dual = spec.dual;
          cfg.seed = in.seed;
          cfg.exact_budget = spec.exact_budget;
          c.result = run_solver(gen->mrf, cfg);
          c.metrics = compute_metrics(c.result, exact, gen->ground_truth);
          c.ok = true;
        } catch (const std::exception& e) {
          c.error = e.what();
        }
      }
    }
  };

  const int threads = std::max(1, spec.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::map<std::tuple<int, int, int>, Group> by_nk;  // (method, N, K)
  std::map<std::pair<int, int>, Group> by_n, by_k;
  for (const auto& c : report.cells) {
    const int method = static_cast<int>(c.method);
    const int n = c.rows * c.cols;
    accumulate(by_nk[{method, n, c.num_labels}], c);
    accumulate(by_n[{method, n}], c);
    accumulate(by_k[{method, c.num_labels}], c);
  }

  std::ostringstream table;
  table << "method,num_nodes,num_labels,runs,failures,certified_pct,"
           "rounding_gap_mean,rounding_gap_std,relaxation_gap_mean,"
           "relaxation_gap_std,optimal_labels_mean,optimal_labels_std,"
           "label_agreement_mean,label_agreement_std,time_ms_mean,time_ms_std\n";
  for (const auto& [key, g] : by_nk) {
    const auto [method, n, k] = key;
    table << to_string(static_cast<Method>(method)) << "," << n << "," << k
          << "," << g.runs << "," << g.failures << ","
          << fmt(100.0 * g.certified / g.runs);
    write_mean_std(table, g.rounding);
    write_mean_std(table, g.relaxation);
    write_mean_std(table, g.optimal);
    write_mean_std(table, g.agreement);
    write_mean_std(table, g.time_ms);
    table << "\n";
  }
  report.table_csv = table.str();

  auto series = [](const std::map<std::pair<int, int>, Group>& groups,
                   const char* axis) {
    std::ostringstream os;
    os << "method," << axis
       << ",runs,relaxation_gap_median,rounding_gap_median\n";
    for (const auto& [key, g] : groups) {
      os << to_string(static_cast<Method>(key.first)) << "," << key.second
         << "," << g.runs;
      write_median(os, g.relaxation);
      write_median(os, g.rounding);
      os << "\n";
    }
    return os.str();
  };
  report.gap_vs_n_csv = series(by_n, "num_nodes");
  report.gap_vs_k_csv = series(by_k, "num_labels");
  return report;
}

}  // namespace mrfsdp
