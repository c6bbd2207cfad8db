#pragma once

// Command-line front end. run() is kept separate from main() so the test
// suite can drive it in-process.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "smil/bench.hpp"
#include "smil/oracle.hpp"
#include "smil/problem_io.hpp"
#include "smil/solver.hpp"

namespace smil::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kIterationLimit = 2,
  kBacktrackLimit = 3,
  kMilpInfeasible = 4,
  kNegativeCriticality = 5,
  kDiverging = 6,
  kProblemInfeasible = 7,
  kMilpFailure = 8,
};

inline int exit_code(SolveStatus s) {
  switch (s) {
    case SolveStatus::Critical: return kOk;
    case SolveStatus::IterationLimit: return kIterationLimit;
    case SolveStatus::BacktrackLimit: return kBacktrackLimit;
    case SolveStatus::MilpSubproblemInfeasible: return kMilpInfeasible;
    case SolveStatus::NegativeCriticality: return kNegativeCriticality;
    case SolveStatus::ObjectiveDiverging: return kDiverging;
    case SolveStatus::ProblemInfeasible: return kProblemInfeasible;
    case SolveStatus::MilpFailure: return kMilpFailure;
  }
  return kUsage;
}

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string trace_csv(const SolveResult& r) {
  std::string s = "k,f,m,delta,psi,a,rho,backtracks,milp_nodes,refined\n";
  for (const auto& it : r.trace) {
    s += std::to_string(it.k) + "," + fmt(it.f) + "," + fmt(it.m) + "," + fmt(it.delta) + "," + fmt(it.psi) + "," + fmt(it.a) +
         "," + fmt(it.rho) + "," + std::to_string(it.backtracks) + "," + std::to_string(it.milp_nodes) + "," +
         (it.refined ? "1" : "0") + "\n";
  }
  return s;
}

inline std::string trajectory_csv(const TurboParams& p, std::span<const double> x) {
  const TurboTrajectory tr = decode_turbo(p, x);
  std::string s = "t,q,v,w,a,b\n";
  for (std::size_t k = 0; k < tr.t.size(); ++k)
    s += fmt(tr.t[k]) + "," + fmt(tr.q[k]) + "," + fmt(tr.v[k]) + "," + fmt(std::round(tr.w[k])) + "," + fmt(tr.a[k]) + "," +
         fmt(tr.b[k]) + "\n";
  return s;
}

inline nlohmann::json summary_json(const SolveResult& r) {
  return {{"status", to_string(r.status)},
          {"objective", r.f},
          {"initial_objective", r.f0},
          {"iterations", r.iterations},
          {"milps", r.milp_solves},
          {"milp_nodes", r.milp_nodes},
          {"refinements", r.refinements},
          {"final_psi", r.final_psi},
          {"final_delta", r.final_delta},
          {"projected", r.projected},
          {"runtime", r.solve_seconds},
          {"projection_runtime", r.projection_seconds}};
}

inline bool write_file(const std::string& path, const std::string& content, std::ostream& err) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    err << "error: cannot write " << path << "\n";
    return false;
  }
  out << content;
  return static_cast<bool>(out);
}

/// Quantile with linear interpolation between order statistics.
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

struct SolveFlags {
  std::string problem = "turbo";
  std::string file;
  int n = 25;
  std::uint64_t seed = 1;
  int n_real = 4, n_int = 2, rows = 4;
  double eps = 1e-8, delta0 = 1.0, rho = 0.1, kappa = 0.5, kappa_m = 0.5;
  double rho1 = -1.0, rho2 = -1.0, delta_min = 1e-6, delta_max = 1e3;
  std::string norm = "linf", tr_rule = "classic", refine = "off";
  int max_iter = 1000, max_backtracks = 60;
  double f_floor = -1e12;
};

inline void add_problem_flags(CLI::App* cmd, SolveFlags& f, bool with_file = true) {
  cmd->add_option("--problem", f.problem, "Built-in problem: turbo or random")
      ->check(CLI::IsMember({"turbo", "random"}));
  if (with_file) cmd->add_option("--file", f.file, "JSON problem file (overrides --problem)");
  cmd->add_option("--n", f.n, "Turbo discretization intervals")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "Seed for initial guesses and random instances");
  cmd->add_option("--n-real", f.n_real, "Random instance: real variables");
  cmd->add_option("--n-int", f.n_int, "Random instance: integer variables");
  cmd->add_option("--rows", f.rows, "Random instance: constraint rows");
}

inline void add_solver_flags(CLI::App* cmd, SolveFlags& f) {
  cmd->add_option("--eps", f.eps, "Criticality tolerance");
  cmd->add_option("--delta0", f.delta0, "Initial trust-region radius");
  cmd->add_option("--rho", f.rho, "Acceptance threshold");
  cmd->add_option("--kappa", f.kappa, "Radius reduction factor");
  cmd->add_option("--kappa-m", f.kappa_m, "Merit averaging weight");
  cmd->add_option("--rho1", f.rho1, "Classic rule: shrink below (default rho)");
  cmd->add_option("--rho2", f.rho2, "Classic rule: grow at or above (default 2*rho)");
  cmd->add_option("--delta-min", f.delta_min, "Reset rule: smallest radius");
  cmd->add_option("--delta-max", f.delta_max, "Reset rule: largest radius");
  cmd->add_option("--norm", f.norm, "Trust-region norm")->check(CLI::IsMember({"linf", "l1"}));
  cmd->add_option("--tr-rule", f.tr_rule, "Radius update rule")->check(CLI::IsMember({"classic", "reset"}));
  cmd->add_option("--refine", f.refine, "Fixed-integer refinement")->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--max-iter", f.max_iter, "Outer iteration cap");
  cmd->add_option("--max-backtracks", f.max_backtracks, "Backtracking cap per iteration");
  cmd->add_option("--f-floor", f.f_floor, "Divergence floor on the objective");
}

inline SolverConfig make_config(const SolveFlags& f) {
  SolverConfig c;
  c.eps = f.eps;
  c.delta0 = f.delta0;
  c.rho = f.rho;
  c.kappa = f.kappa;
  c.kappa_m = f.kappa_m;
  c.norm = f.norm == "l1" ? NormKind::L1 : NormKind::LInf;
  if (f.tr_rule == "reset") c.rule = ResetRule{f.delta_min, f.delta_max};
  else c.rule = ClassicRule{f.rho1 > 0 ? f.rho1 : f.rho, f.rho2 > 0 ? f.rho2 : 2.0 * f.rho};
  c.refine = f.refine == "on";
  c.max_outer_iterations = f.max_iter;
  c.max_backtracks = f.max_backtracks;
  c.f_floor = f.f_floor;
  c.validate();
  return c;
}

struct LoadedProblem {
  Problem problem;
  std::vector<double> x0;
  bool turbo = false;
  TurboParams turbo_params;
};

inline LoadedProblem load(const SolveFlags& f) {
  LoadedProblem lp;
  if (!f.file.empty()) {
    lp.problem = load_problem(f.file);
    lp.x0 = lp.problem.initial_point.value_or(std::vector<double>(static_cast<std::size_t>(lp.problem.X.num_vars()), 0.0));
  } else if (f.problem == "turbo") {
    lp.turbo = true;
    lp.turbo_params.N = f.n;
    Instance inst = build_turbo(lp.turbo_params);
    lp.problem.X = std::move(inst.X);
    lp.problem.objective = std::move(inst.objective);
    lp.x0 = turbo_initial_guess(lp.turbo_params, f.seed);
  } else {
    RandomInstance inst = random_instance(f.seed, f.n_real, f.n_int, f.rows);
    lp.problem.X = std::move(inst.X);
    lp.problem.objective = std::move(inst.objective);
    lp.x0 = inst.planted;
  }
  lp.problem.initial_point = lp.x0;
  return lp;
}

inline std::vector<nlohmann::json> read_summaries(const std::vector<std::string>& files) {
  std::vector<nlohmann::json> all;
  for (const auto& path : files) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open file");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        all.push_back(nlohmann::json::parse(line));
      } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
      }
    }
  }
  return all;
}

inline std::string stats_table(const std::vector<nlohmann::json>& rows) {
  const char* fields[] = {"objective", "iterations", "milps", "runtime", "projection_runtime"};
  std::ostringstream os;
  os << "field,count,min,q25,median,q75,max\n";
  for (const char* key : fields) {
    std::vector<double> v;
    for (const auto& r : rows)
      if (r.contains(key) && r[key].is_number()) v.push_back(r[key].get<double>());
    os << key << "," << v.size() << "," << fmt(quantile(v, 0.0)) << "," << fmt(quantile(v, 0.25)) << ","
       << fmt(quantile(v, 0.5)) << "," << fmt(quantile(v, 0.75)) << "," << fmt(quantile(v, 1.0)) << "\n";
  }
  return os.str();
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Trust-region sequential mixed-integer linearization solver"};
  app.require_subcommand(1);

  SolveFlags sf;
  std::string trace_path, summary_path, trajectory_path;
  auto* solve_cmd = app.add_subcommand("solve", "Run the solver on one problem");
  add_problem_flags(solve_cmd, sf);
  add_solver_flags(solve_cmd, sf);
  solve_cmd->add_option("--trace", trace_path, "Write the iteration trace CSV here");
  solve_cmd->add_option("--summary", summary_path, "Write the summary JSON here (default: stdout)");
  solve_cmd->add_option("--trajectory", trajectory_path, "Turbo only: write t,q,v,w,a,b CSV here");

  std::string base_file, base_out;
  std::size_t combo_limit = 4096;
  int starts = 10;
  std::uint64_t base_seed = 1;
  auto* base_cmd = app.add_subcommand("baseline", "Enumerate integer combinations and refine each");
  base_cmd->add_option("--file", base_file, "JSON problem file")->required();
  base_cmd->add_option("--combo-limit", combo_limit, "Maximum number of integer combinations");
  base_cmd->add_option("--starts", starts, "Random starts per feasible combination");
  base_cmd->add_option("--seed", base_seed, "Seed for the random starts");
  base_cmd->add_option("--table", base_out, "Write the per-combination CSV here (default: stdout)");

  std::vector<std::string> stats_inputs;
  auto* stats_cmd = app.add_subcommand("stats", "Quartile table over summary JSON lines");
  stats_cmd->add_option("inputs", stats_inputs, "Files with one summary JSON per line")->required();

  SolveFlags cf;
  std::uint64_t first_seed = 1;
  int count = 10, jobs = 1;
  std::string out_dir = "campaign";
  auto* camp_cmd = app.add_subcommand("campaign", "Solve one built-in problem for a range of seeds");
  add_problem_flags(camp_cmd, cf, false);
  add_solver_flags(camp_cmd, cf);
  camp_cmd->add_option("--first-seed", first_seed, "First seed");
  camp_cmd->add_option("--count", count, "Number of seeds")->check(CLI::PositiveNumber);
  camp_cmd->add_option("--jobs", jobs, "Parallel solves")->check(CLI::PositiveNumber);
  camp_cmd->add_option("--out-dir", out_dir, "Directory for per-seed traces and merged summaries");

  SolveFlags ef;
  std::string export_path;
  auto* export_cmd = app.add_subcommand("export", "Write a built-in problem as a JSON problem file");
  add_problem_flags(export_cmd, ef, false);
  export_cmd->add_option("--out", export_path, "Output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*solve_cmd) {
      const SolverConfig cfg = make_config(sf);
      LoadedProblem lp = load(sf);
      const SolveResult r = solve(lp.problem.X, lp.problem.objective, lp.x0, cfg);
      if (!trace_path.empty() && !write_file(trace_path, trace_csv(r), err)) return kUsage;
      if (!trajectory_path.empty()) {
        if (!lp.turbo) {
          err << "error: --trajectory needs --problem turbo\n";
          return kUsage;
        }
        if (!r.x.empty() && !write_file(trajectory_path, trajectory_csv(lp.turbo_params, r.x), err)) return kUsage;
      }
      nlohmann::json s = summary_json(r);
      s["seed"] = sf.seed;
      const std::string text = s.dump() + "\n";
      if (summary_path.empty()) out << text;
      else if (!write_file(summary_path, text, err)) return kUsage;
      return exit_code(r.status);
    }
    if (*base_cmd) {
      const Problem p = load_problem(base_file);
      RefineConfig rc;
      const MinlpEnumeration res = enumerate_minlp(p.X, p.objective, combo_limit, starts, rc, base_seed);
      std::ostringstream table;
      table << "combo";
      for (int j : p.X.integers()) table << "," << p.X.names()[static_cast<std::size_t>(j)];
      table << ",feasible,best_f\n";
      for (std::size_t c = 0; c < res.table.size(); ++c) {
        const ComboRow& row = res.table[c];
        table << c;
        for (double z : row.z) table << "," << fmt(z);
        table << "," << (row.feasible ? 1 : 0) << "," << (row.feasible ? fmt(row.best_f) : std::string("")) << "\n";
      }
      nlohmann::json s = {{"combinations", res.table.size()}, {"feasible_combinations", res.feasible_combos},
                          {"refine_calls", res.refine_calls}, {"found", res.found}};
      if (res.found) {
        s["objective"] = res.f;
        s["x"] = res.x;
      }
      if (base_out.empty()) {
        out << table.str();
      } else if (!write_file(base_out, table.str(), err)) {
        return kUsage;
      }
      out << s.dump() << "\n";
      return res.found ? kOk : kProblemInfeasible;
    }
    if (*stats_cmd) {
      out << stats_table(read_summaries(stats_inputs));
      return kOk;
    }
    if (*camp_cmd) {
      const SolverConfig cfg = make_config(cf);
      std::filesystem::create_directories(out_dir);
      std::vector<std::string> lines(static_cast<std::size_t>(count));
      std::vector<int> codes(static_cast<std::size_t>(count), kOk);
      std::mutex err_lock;
      std::size_t next = 0;
      std::mutex next_lock;
      const auto worker = [&] {
        for (;;) {
          std::size_t i;
          {
            std::lock_guard<std::mutex> g(next_lock);
            if (next >= lines.size()) return;
            i = next++;
          }
          SolveFlags f = cf;
          f.seed = first_seed + i;
          LoadedProblem lp = load(f);
          const SolveResult r = solve(lp.problem.X, lp.problem.objective, lp.x0, cfg);
          const std::string stem = out_dir + "/seed" + std::to_string(f.seed);
          std::ostringstream sink;
          if (!write_file(stem + "_trace.csv", trace_csv(r), sink)) {
            std::lock_guard<std::mutex> g(err_lock);
            err << sink.str();
          }
          if (lp.turbo && !r.x.empty()) write_file(stem + "_trajectory.csv", trajectory_csv(lp.turbo_params, r.x), sink);
          nlohmann::json s = summary_json(r);
          s["seed"] = f.seed;
          lines[i] = s.dump() + "\n";
          codes[i] = exit_code(r.status);
        }
      };
      std::vector<std::thread> pool;
      for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
      worker();
      for (auto& t : pool) t.join();
      std::string merged;
      for (const auto& l : lines) merged += l;
      if (!write_file(out_dir + "/summaries.jsonl", merged, err)) return kUsage;
      out << merged;
      for (int c : codes)
        if (c != kOk) return c;
      return kOk;
    }
    if (*export_cmd) {
      LoadedProblem lp = load(ef);
      const std::string text = export_problem(lp.problem.X, lp.problem.objective, &lp.x0);
      if (export_path.empty()) out << text;
      else if (!write_file(export_path, text, err)) return kUsage;
      return kOk;
    }
  } catch (const ProblemFileError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace smil::cli
