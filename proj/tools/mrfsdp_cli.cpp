// mrfsdp: generate, solve, evaluate and benchmark Potts MRF instances.
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mrfsdp/bench.hpp"
#include "mrfsdp/encoding.hpp"
#include "mrfsdp/error.hpp"
#include "mrfsdp/io.hpp"
#include "mrfsdp/metrics.hpp"
#include "mrfsdp/runner.hpp"

using namespace mrfsdp;
namespace fs = std::filesystem;

namespace {

constexpr const char* kThreadsEnv = "MRFSDP_NUM_THREADS";

int thread_cap() {
  const char* raw = std::getenv(kThreadsEnv);
  if (!raw || !*raw) return 1;
  char* end = nullptr;
  const long v = std::strtol(raw, &end, 10);
  if (*end != '\0' || v < 1 || v > 1024) {
    throw InvalidInputError(std::string(kThreadsEnv) +
                            " must be a positive integer");
  }
  return static_cast<int>(v);
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  try {
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      const auto dash = item.find('-');
      if (dash == std::string::npos) {
        out.push_back(std::stoull(item));
      } else {
        const auto lo = std::stoull(item.substr(0, dash));
        const auto hi = std::stoull(item.substr(dash + 1));
        if (hi < lo) throw InvalidInputError("empty seed range " + item);
        for (auto s = lo; s <= hi; ++s) out.push_back(s);
      }
    }
  } catch (const std::logic_error&) {
    throw InvalidInputError("bad seed list '" + text + "'");
  }
  if (out.empty()) throw InvalidInputError("no seeds given");
  return out;
}

std::vector<int> parse_ints(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  try {
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) out.push_back(std::stoi(item));
    }
  } catch (const std::logic_error&) {
    throw InvalidInputError("bad integer list '" + text + "'");
  }
  if (out.empty()) throw InvalidInputError("empty list");
  return out;
}

void emit(const std::string& out, const std::string& content) {
  if (out.empty() || out == "-") {
    std::cout << content;
  } else {
    write_file_atomic(out, content);
  }
}

fs::path sibling(const fs::path& base, const std::string& suffix) {
  fs::path p = base.parent_path() / (base.stem().string() + suffix);
  return p;
}

// Flags shared by solve: every SolverParams and DualParams field.
struct SolveFlags {
  std::string method = "fuses";
  std::uint64_t seed = 0;
  bool warm_start = false;
  std::optional<double> grad_norm_tol, eig_tol, rel_func_decrease_tol,
      initial_tr_radius, tr_decrease_factor, tr_increase_factor, cg_success_eta;
  std::optional<int> max_tnt_iterations, max_cg_iterations, max_staircase_steps;
  std::optional<double> dual_step_size, dual_grad_tol;
  std::optional<int> dual_max_iterations;
  int icm_max_sweeps = 100;
  std::uint64_t exact_budget = kDefaultExactBudget;

  RunConfig config() const {
    RunConfig c = RunConfig::defaults_for(parse_method(method));
    c.seed = seed;
    c.warm_start = warm_start;
    c.icm_max_sweeps = icm_max_sweeps;
    c.exact_budget = exact_budget;
    SolverParams& p = c.params;
    if (grad_norm_tol) p.grad_norm_tol = *grad_norm_tol;
    if (eig_tol) p.eig_tol = *eig_tol;
    if (rel_func_decrease_tol) p.rel_func_decrease_tol = *rel_func_decrease_tol;
    if (initial_tr_radius) p.initial_tr_radius = *initial_tr_radius;
    if (tr_decrease_factor) p.tr_decrease_factor = *tr_decrease_factor;
    if (tr_increase_factor) p.tr_increase_factor = *tr_increase_factor;
    if (cg_success_eta) p.cg_success_eta = *cg_success_eta;
    if (max_tnt_iterations) p.max_tnt_iterations = *max_tnt_iterations;
    if (max_cg_iterations) p.max_cg_iterations = *max_cg_iterations;
    if (max_staircase_steps) p.max_staircase_steps = *max_staircase_steps;
    if (dual_step_size) c.dual.step_size = *dual_step_size;
    if (dual_grad_tol) c.dual.grad_tol = *dual_grad_tol;
    if (dual_max_iterations) c.dual.max_iterations = *dual_max_iterations;
    c.validate();
    return c;
  }

  void add_to(CLI::App* app) {
    app->add_option("--method", method, "fuses, dars, icm or exact")
        ->capture_default_str();
    app->add_option("--seed", seed, "Random seed")->capture_default_str();
    app->add_flag("--warm-start", warm_start,
                  "FUSES: start from the unary argmin labeling");
    app->add_option("--grad-norm-tol", grad_norm_tol,
                    "Default 1e-2 (fuses) or 1e-3 (dars)");
    app->add_option("--eig-tol", eig_tol, "Default 1e-2");
    app->add_option("--rel-func-decrease-tol", rel_func_decrease_tol,
                    "Default 1e-5");
    app->add_option("--max-tnt-iterations", max_tnt_iterations, "Default 500");
    app->add_option("--initial-tr-radius", initial_tr_radius, "Default 1");
    app->add_option("--tr-decrease-factor", tr_decrease_factor, "Default 0.25");
    app->add_option("--tr-increase-factor", tr_increase_factor, "Default 2.5");
    app->add_option("--max-cg-iterations", max_cg_iterations, "Default 2000");
    app->add_option("--cg-success-eta", cg_success_eta, "Default 0.9");
    app->add_option("--max-staircase-steps", max_staircase_steps, "Default 10");
    app->add_option("--dual-step-size", dual_step_size, "Default 0.005");
    app->add_option("--dual-max-iterations", dual_max_iterations,
                    "Default 1000");
    app->add_option("--dual-grad-tol", dual_grad_tol, "Default 0.5");
    app->add_option("--icm-max-sweeps", icm_max_sweeps)->capture_default_str();
    app->add_option("--exact-budget", exact_budget,
                    "State budget for the exact solvers")
        ->capture_default_str();
  }
};

std::string error_document(const Error& e) {
  static const char* names[] = {"invalid_input", "infeasible", "numerical",
                                "size_refusal", "degenerate_step"};
  nlohmann::ordered_json doc;
  doc["error"] = {{"kind", names[static_cast<int>(e.kind())]},
                  {"message", e.what()}};
  return doc.dump(1) + "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MAP inference for Potts MRFs with low-rank SDP relaxations"};
  app.require_subcommand(1);

  // gen
  GridSpec gs;
  std::string gen_out, truth_out;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic grid instance");
  gen->add_option("--rows", gs.rows)->capture_default_str();
  gen->add_option("--cols", gs.cols)->capture_default_str();
  gen->add_option("--labels", gs.num_labels)->capture_default_str();
  gen->add_option("--noise", gs.unary_noise, "Probability of a wrong measurement")
      ->capture_default_str();
  gen->add_option("--unary-weight-min", gs.unary_weight_min)->capture_default_str();
  gen->add_option("--unary-weight-max", gs.unary_weight_max)->capture_default_str();
  gen->add_option("--lambda1", gs.binary.lambda1)->capture_default_str();
  gen->add_option("--lambda2", gs.binary.lambda2)->capture_default_str();
  gen->add_option("--beta", gs.binary.beta, "<= 0 picks it from the features")
      ->capture_default_str();
  gen->add_option("--color-noise", gs.binary.color_noise)->capture_default_str();
  gen->add_option("--seed", gs.seed)->capture_default_str();
  gen->add_option("--out", gen_out, "Instance file")->required();
  gen->add_option("--truth-out", truth_out, "Ground-truth labeling file");

  // solve
  SolveFlags sf;
  std::string solve_in, solve_out;
  bool verbose = false;
  auto* solve = app.add_subcommand("solve", "Solve an instance");
  solve->add_option("--instance", solve_in)->required();
  solve->add_option("--out", solve_out, "Result file (default stdout)");
  solve->add_flag("-v,--verbose", verbose, "Progress lines on stderr");
  sf.add_to(solve);

  // eval
  std::vector<std::string> eval_results;
  std::string eval_exact, eval_truth, eval_instance, eval_out;
  auto* eval = app.add_subcommand("eval", "Score result files");
  eval->add_option("--result", eval_results)->required();
  eval->add_option("--exact", eval_exact, "Result file of the exact method");
  eval->add_option("--truth", eval_truth, "Ground-truth labeling file");
  eval->add_option("--instance", eval_instance,
                   "Instance file; checked against the results");
  eval->add_option("--out", eval_out);

  // bench
  std::string bench_grids = "4x4,6x6,8x8", bench_labels = "2,3",
              bench_seeds = "0-4", bench_methods = "fuses,dars,icm,exact",
              bench_out;
  GridSpec bench_gs;
  std::uint64_t bench_budget = kDefaultExactBudget;
  auto* bench = app.add_subcommand("bench", "Run a gen/solve/eval family");
  bench->add_option("--grids", bench_grids, "e.g. 4x4,6x6")->capture_default_str();
  bench->add_option("--labels", bench_labels)->capture_default_str();
  bench->add_option("--seeds", bench_seeds, "e.g. 0-9 or 1,4,7")
      ->capture_default_str();
  bench->add_option("--methods", bench_methods)->capture_default_str();
  bench->add_option("--noise", bench_gs.unary_noise)->capture_default_str();
  bench->add_option("--lambda1", bench_gs.binary.lambda1)->capture_default_str();
  bench->add_option("--lambda2", bench_gs.binary.lambda2)->capture_default_str();
  bench->add_option("--exact-budget", bench_budget)->capture_default_str();
  bench->add_option("--out", bench_out,
                    "Table file; gap series go next to it")
      ->required();

  // export-matrix
  std::string exp_in, exp_enc = "zo", exp_out;
  auto* exportm = app.add_subcommand("export-matrix",
                                     "Write an encoding's cost matrix as triplets");
  exportm->add_option("--instance", exp_in)->required();
  exportm->add_option("--encoding", exp_enc, "zo or pm")->capture_default_str();
  exportm->add_option("--out", exp_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*gen) {
      const GeneratedInstance g = generate_grid_instance(gs);
      write_instance(gen_out, g.mrf);
      if (!truth_out.empty()) {
        write_file_atomic(truth_out, serialize_labeling(g.ground_truth));
      }
      std::cout << "N=" << g.mrf.num_nodes() << " K=" << g.mrf.num_labels()
                << " edges=" << g.mrf.binary_terms().size() << "\n";
    } else if (*solve) {
      const RunConfig cfg = sf.config();
      const MrfInstance mrf = read_instance(solve_in);
      try {
        const SolveResult r = run_solver(mrf, cfg, verbose ? &std::cerr : nullptr);
        emit(solve_out, serialize_result(r));
      } catch (const Error& e) {
        if (!solve_out.empty() && solve_out != "-") {
          write_file_atomic(solve_out, error_document(e));
        }
        throw;
      }
    } else if (*eval) {
      std::optional<MrfInstance> inst;
      if (!eval_instance.empty()) inst.emplace(read_instance(eval_instance));
      std::optional<SolveResult> exact;
      if (!eval_exact.empty()) exact = parse_result(read_text_file(eval_exact));
      std::optional<Labeling> truth;
      if (!eval_truth.empty()) truth = parse_labeling(read_text_file(eval_truth));
      nlohmann::ordered_json reports = nlohmann::ordered_json::array();
      for (const auto& path : eval_results) {
        const SolveResult r = parse_result(read_text_file(path));
        if (inst) {
          if (instance_fingerprint(*inst) != r.instance_fingerprint) {
            throw InvalidInputError(path + " was not produced from " +
                                    eval_instance);
          }
          inst->validate_labeling(r.labeling);
        }
        if (truth && truth->size() != r.labeling.size()) {
          throw InvalidInputError("ground truth does not match " + path);
        }
        std::optional<ExactReference> ref;
        if (exact) ref = exact_reference_from(*exact, r);
        auto doc = nlohmann::ordered_json::parse(
            serialize_metrics(compute_metrics(r, ref, truth)));
        doc["result"] = path;
        doc["method"] = to_string(r.method);
        reports.push_back(doc);
      }
      emit(eval_out, (reports.size() == 1 ? reports[0] : reports).dump(1) + "\n");
    } else if (*bench) {
      BenchSpec spec;
      spec.grids = parse_grid_list(bench_grids);
      spec.labels = parse_ints(bench_labels);
      spec.seeds = parse_seeds(bench_seeds);
      std::stringstream ms(bench_methods);
      std::string m;
      while (std::getline(ms, m, ',')) {
        if (!m.empty()) spec.methods.push_back(parse_method(m));
      }
      spec.instance = bench_gs;
      spec.exact_budget = bench_budget;
      spec.threads = thread_cap();
      const BenchReport rep = run_bench(spec);
      const fs::path out = bench_out;
      write_file_atomic(out, rep.table_csv);
      write_file_atomic(sibling(out, "_gap_vs_n.csv"), rep.gap_vs_n_csv);
      write_file_atomic(sibling(out, "_gap_vs_k.csv"), rep.gap_vs_k_csv);
      int failures = 0;
      for (const auto& c : rep.cells) {
        if (!c.ok) {
          ++failures;
          std::cerr << "failed: " << to_string(c.method) << " " << c.rows << "x"
                    << c.cols << " K=" << c.num_labels << " seed=" << c.seed
                    << ": " << c.error << "\n";
        }
      }
      std::cout << "cells=" << rep.cells.size() << " failures=" << failures
                << "\n";
    } else if (*exportm) {
      const MrfInstance mrf = read_instance(exp_in);
      if (exp_enc == "zo") {
        const ZoEncoding enc = encode_zo(mrf);
        emit(exp_out, export_triplets(enc.cost, enc.offset));
      } else if (exp_enc == "pm") {
        const PmEncoding enc = encode_pm(mrf);
        emit(exp_out, export_triplets(enc.cost, enc.offset));
      } else {
        throw InvalidInputError("encoding must be zo or pm");
      }
    }
  } catch (const Error& e) {
    std::cerr << error_document(e);
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
