#include "mrfsdp/runner.hpp"

#include <chrono>
#include <cmath>
#include <set>

#include "json.hpp"
#include "mrfsdp/error.hpp"
#include "mrfsdp/fuses.hpp"
#include "mrfsdp/io.hpp"

namespace mrfsdp {

using json = nlohmann::ordered_json;

namespace {

void require_keys(const json& obj, const std::set<std::string>& keys,
                  const std::string& where) {
  if (!obj.is_object()) throw InvalidInputError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!keys.count(key)) {
      throw InvalidInputError("unknown key '" + key + "' in " + where);
    }
  }
  for (const auto& key : keys) {
    if (!obj.contains(key)) {
      throw InvalidInputError("missing key '" + key + "' in " + where);
    }
  }
}

template <typename T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> get_opt(const json& obj, const std::string& key) {
  const json& v = obj.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<T>();
}

json solver_json(const SolverParams& p) {
  return {{"grad_norm_tol", p.grad_norm_tol},
          {"eig_tol", p.eig_tol},
          {"rel_func_decrease_tol", p.rel_func_decrease_tol},
          {"max_tnt_iterations", p.max_tnt_iterations},
          {"initial_tr_radius", p.initial_tr_radius},
          {"tr_decrease_factor", p.tr_decrease_factor},
          {"tr_increase_factor", p.tr_increase_factor},
          {"max_cg_iterations", p.max_cg_iterations},
          {"cg_success_eta", p.cg_success_eta},
          {"max_staircase_steps", p.max_staircase_steps}};
}

SolverParams solver_from_json(const json& j) {
  require_keys(j,
               {"grad_norm_tol", "eig_tol", "rel_func_decrease_tol",
                "max_tnt_iterations", "initial_tr_radius", "tr_decrease_factor",
                "tr_increase_factor", "max_cg_iterations", "cg_success_eta",
                "max_staircase_steps"},
               "solver config");
  SolverParams p;
  p.grad_norm_tol = j["grad_norm_tol"].get<double>();
  p.eig_tol = j["eig_tol"].get<double>();
  p.rel_func_decrease_tol = j["rel_func_decrease_tol"].get<double>();
  p.max_tnt_iterations = j["max_tnt_iterations"].get<int>();
  p.initial_tr_radius = j["initial_tr_radius"].get<double>();
  p.tr_decrease_factor = j["tr_decrease_factor"].get<double>();
  p.tr_increase_factor = j["tr_increase_factor"].get<double>();
  p.max_cg_iterations = j["max_cg_iterations"].get<int>();
  p.cg_success_eta = j["cg_success_eta"].get<double>();
  p.max_staircase_steps = j["max_staircase_steps"].get<int>();
  return p;
}

json dual_json(const DualParams& d) {
  return {{"step_size", d.step_size},
          {"max_iterations", d.max_iterations},
          {"grad_tol", d.grad_tol},
          {"divergence_factor", d.divergence_factor},
          {"divergence_window", d.divergence_window}};
}

DualParams dual_from_json(const json& j) {
  require_keys(j,
               {"step_size", "max_iterations", "grad_tol", "divergence_factor",
                "divergence_window"},
               "dual config");
  DualParams d;
  d.step_size = j["step_size"].get<double>();
  d.max_iterations = j["max_iterations"].get<int>();
  d.grad_tol = j["grad_tol"].get<double>();
  d.divergence_factor = j["divergence_factor"].get<double>();
  d.divergence_window = j["divergence_window"].get<int>();
  return d;
}

json result_json(const SolveResult& r, bool with_timings) {
  json doc;
  doc["method"] = to_string(r.method);
  doc["instance_fingerprint"] = r.instance_fingerprint;
  doc["num_nodes"] = r.num_nodes;
  doc["num_labels"] = r.num_labels;
  doc["labeling"] = r.labeling;
  doc["energy"] = r.energy;
  doc["f_relaxed"] = opt(r.f_relaxed);
  doc["f_primal"] = opt(r.f_primal);
  doc["offset"] = opt(r.offset);
  doc["subopt_bound"] = opt(r.subopt_bound);
  doc["certified"] = opt(r.certified);
  doc["converged"] = opt(r.converged);
  doc["diverged"] = opt(r.diverged);
  doc["dual_iterations"] = opt(r.dual_iterations);
  doc["constraint_residual_max"] = opt(r.constraint_residual_max);
  doc["min_eigenvalue"] = opt(r.min_eigenvalue);
  doc["rank_deficient"] = opt(r.rank_deficient);
  doc["min_singular_value_ratio"] = opt(r.min_singular_value_ratio);
  doc["states_enumerated"] = opt(r.states_enumerated);
  doc["sweeps"] = opt(r.sweeps);
  doc["rank_history"] = json::array();
  for (const auto& s : r.rank_history) {
    doc["rank_history"].push_back({{"rank", s.rank},
                                   {"iterations", s.iterations},
                                   {"grad_norm", s.grad_norm},
                                   {"objective", s.objective},
                                   {"min_eigenvalue", s.min_eigenvalue},
                                   {"stop", s.stop}});
  }
  if (with_timings) doc["timings"] = r.timings;
  const RunConfig& c = r.config;
  doc["config"] = {{"method", to_string(c.method)},
                   {"seed", c.seed},
                   {"warm_start", c.warm_start},
                   {"icm_max_sweeps", c.icm_max_sweeps},
                   {"exact_budget", c.exact_budget},
                   {"solver", solver_json(c.params)},
                   {"dual", dual_json(c.dual)}};
  return doc;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::Fuses:
      return "fuses";
    case Method::Dars:
      return "dars";
    case Method::Icm:
      return "icm";
    case Method::Exact:
      return "exact";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "fuses") return Method::Fuses;
  if (name == "dars") return Method::Dars;
  if (name == "icm") return Method::Icm;
  if (name == "exact") return Method::Exact;
  throw InvalidInputError("unknown method '" + std::string(name) + "'");
}

RunConfig RunConfig::defaults_for(Method m) {
  RunConfig c;
  c.method = m;
  c.params = m == Method::Dars ? SolverParams::dars_defaults()
                               : SolverParams::fuses_defaults();
  return c;
}

void RunConfig::validate() const {
  params.validate();
  dual.validate();
  if (icm_max_sweeps < 1) throw InvalidInputError("icm sweeps must be positive");
  if (exact_budget < 1) throw InvalidInputError("exact budget must be positive");
}

bool RunConfig::operator==(const RunConfig& o) const {
  return method == o.method && params == o.params && dual == o.dual &&
         seed == o.seed && warm_start == o.warm_start &&
         icm_max_sweeps == o.icm_max_sweeps && exact_budget == o.exact_budget;
}

bool SolveResult::operator==(const SolveResult& o) const {
  return result_json(*this, true) == result_json(o, true);
}

SolveResult run_solver(const MrfInstance& mrf, const RunConfig& config,
                       std::ostream* log) {
  config.validate();
  SolveResult r;
  r.method = config.method;
  r.config = config;
  r.instance_fingerprint = instance_fingerprint(mrf);
  r.num_nodes = mrf.num_nodes();
  r.num_labels = mrf.num_labels();
  const auto t0 = std::chrono::steady_clock::now();

  switch (config.method) {
    case Method::Fuses: {
      FusesOptions opts;
      opts.params = config.params;
      opts.seed = config.seed;
      opts.warm_start = config.warm_start;
      const FusesResult f = fuses_solve(mrf, opts, log);
      r.labeling = f.labeling;
      r.energy = f.f_rounded;
      r.f_relaxed = f.f_relaxed;
      r.f_primal = f.f_primal;
      r.offset = f.offset;
      r.subopt_bound = f.subopt_bound;
      r.certified = f.certified;
      r.min_eigenvalue = f.min_eigenvalue;
      r.rank_deficient = f.rank_deficient;
      r.min_singular_value_ratio = f.min_singular_value_ratio;
      r.rank_history = f.rank_history;
      r.timings["solve"] = f.solve_seconds;
      r.timings["round"] = f.round_seconds;
      break;
    }
    case Method::Dars: {
      DarsOptions opts;
      opts.params = config.params;
      opts.dual = config.dual;
      opts.seed = config.seed;
      const DarsResult d = dars_solve(mrf, opts, log);
      r.labeling = d.labeling;
      r.energy = d.f_rounded;
      r.f_relaxed = d.f_relaxed;
      r.f_primal = d.f_primal;
      r.offset = d.offset;
      r.subopt_bound = d.subopt_bound;
      r.certified = d.primal_certified;
      r.converged = d.dual_converged;
      r.diverged = d.diverged;
      r.dual_iterations = d.dual_iterations;
      r.constraint_residual_max = d.constraint_residual_max;
      r.min_eigenvalue = d.min_eigenvalue;
      r.rank_history = d.rank_history;
      r.timings["solve"] = d.solve_seconds;
      r.timings["round"] = d.round_seconds;
      break;
    }
    case Method::Icm: {
      const IcmResult i =
          icm(mrf, unary_argmin(mrf), config.icm_max_sweeps);
      r.labeling = i.labeling;
      r.energy = i.energy;
      r.converged = i.converged;
      r.sweeps = i.sweeps;
      r.timings["solve"] = seconds_since(t0);
      break;
    }
    case Method::Exact: {
      const ExactResult e = exact_solve(mrf, config.exact_budget);
      r.labeling = e.labeling;
      r.energy = e.f_opt;
      r.f_relaxed = e.f_opt;
      r.subopt_bound = 0.0;
      r.certified = true;
      r.states_enumerated = e.states_enumerated;
      r.timings["solve"] = seconds_since(t0);
      break;
    }
  }
  r.timings["total"] = seconds_since(t0);
  // Overflowing weights can make every value below infinite without
  // tripping the solvers; refuse to report them.
  for (const std::optional<double>& v :
       {std::optional<double>(r.energy), r.f_relaxed, r.f_primal, r.offset}) {
    if (v && !std::isfinite(*v)) {
      throw NumericalFailureError("solver produced a non-finite energy or bound",
                                  Eigen::MatrixXd());
    }
  }
  return r;
}

std::string serialize_result(const SolveResult& result) {
  return result_json(result, true).dump(1) + "\n";
}

std::string serialize_result_without_timings(const SolveResult& result) {
  return result_json(result, false).dump(1) + "\n";
}

SolveResult parse_result(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInputError(std::string("malformed result: ") + e.what());
  }
  require_keys(doc,
               {"method", "instance_fingerprint", "num_nodes", "num_labels",
                "labeling", "energy", "f_relaxed", "f_primal", "offset",
                "subopt_bound", "certified", "converged", "diverged",
                "dual_iterations", "constraint_residual_max", "min_eigenvalue",
                "rank_deficient", "min_singular_value_ratio",
                "states_enumerated", "sweeps", "rank_history", "timings",
                "config"},
               "result");
  try {
    SolveResult r;
    r.method = parse_method(doc["method"].get<std::string>());
    r.instance_fingerprint = doc["instance_fingerprint"].get<std::string>();
    r.num_nodes = doc["num_nodes"].get<int>();
    r.num_labels = doc["num_labels"].get<int>();
    r.labeling = doc["labeling"].get<Labeling>();
    r.energy = doc["energy"].get<double>();
    r.f_relaxed = get_opt<double>(doc, "f_relaxed");
    r.f_primal = get_opt<double>(doc, "f_primal");
    r.offset = get_opt<double>(doc, "offset");
    r.subopt_bound = get_opt<double>(doc, "subopt_bound");
    r.certified = get_opt<bool>(doc, "certified");
    r.converged = get_opt<bool>(doc, "converged");
    r.diverged = get_opt<bool>(doc, "diverged");
    r.dual_iterations = get_opt<int>(doc, "dual_iterations");
    r.constraint_residual_max = get_opt<double>(doc, "constraint_residual_max");
    r.min_eigenvalue = get_opt<double>(doc, "min_eigenvalue");
    r.rank_deficient = get_opt<bool>(doc, "rank_deficient");
    r.min_singular_value_ratio =
        get_opt<double>(doc, "min_singular_value_ratio");
    r.states_enumerated = get_opt<std::uint64_t>(doc, "states_enumerated");
    r.sweeps = get_opt<int>(doc, "sweeps");
    for (const auto& s : doc["rank_history"]) {
      require_keys(s,
                   {"rank", "iterations", "grad_norm", "objective",
                    "min_eigenvalue", "stop"},
                   "rank history entry");
      r.rank_history.push_back({s["rank"].get<int>(),
                                s["iterations"].get<int>(),
                                s["grad_norm"].get<double>(),
                                s["objective"].get<double>(),
                                s["min_eigenvalue"].get<double>(),
                                s["stop"].get<std::string>()});
    }
    r.timings = doc["timings"].get<std::map<std::string, double>>();
    const json& c = doc["config"];
    require_keys(c,
                 {"method", "seed", "warm_start", "icm_max_sweeps",
                  "exact_budget", "solver", "dual"},
                 "config");
    r.config.method = parse_method(c["method"].get<std::string>());
    r.config.seed = c["seed"].get<std::uint64_t>();
    r.config.warm_start = c["warm_start"].get<bool>();
    r.config.icm_max_sweeps = c["icm_max_sweeps"].get<int>();
    r.config.exact_budget = c["exact_budget"].get<std::uint64_t>();
    r.config.params = solver_from_json(c["solver"]);
    r.config.dual = dual_from_json(c["dual"]);
    return r;
  } catch (const json::exception& e) {
    throw InvalidInputError(std::string("bad result field: ") + e.what());
  }
}

}  // namespace mrfsdp
