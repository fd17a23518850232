#include "medtrade/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "medtrade/errors.hpp"
#include "medtrade/io.hpp"
#include "medtrade/oracle.hpp"
#include "medtrade/sim.hpp"
#include "medtrade/solver.hpp"
#include "medtrade/verify.hpp"

namespace medtrade {
namespace {

namespace fs = std::filesystem;

constexpr int kOk = 0;
constexpr int kInfeasible = 1;
constexpr int kInputError = 2;
constexpr int kAssumptionError = 3;

std::string out_path(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  return (fs::path(dir) / name).string();
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::vector<double> parse_values(const std::string& csv) {
  std::vector<double> vals;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      vals.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw input_error("cannot parse value '" + item + "'");
    }
  }
  return vals;
}

struct Cfg {
  std::string instance_path;
  std::string mechanism_path;
  std::string out = ".";
  std::size_t grid_t = 201, grid_q = 201;
  double tol = 1e-7;
  std::uint64_t seed = 20240601;
  std::size_t solver_grid = 2049;
  std::uint64_t n_runs = 1000000;
  std::size_t n_buckets = 20;
  std::string grids = "8,12,16,32";
  std::uint64_t max_candidates = 3000000;
  std::string sweep_param = "reserve";
  std::string sweep_values;
  double sweep_from = 0.0, sweep_to = 0.0;
  int sweep_steps = 0;
};

ThresholdMechanism solve_instance(const Cfg& cfg, const ProblemInstance& inst) {
  SolveOptions sopt;
  sopt.grid_size = cfg.solver_grid;
  return solve(inst, sopt);
}

int cmd_solve(const Cfg& cfg) {
  const ProblemInstance inst = load_instance(cfg.instance_path);
  const ThresholdMechanism mech = solve_instance(cfg, inst);
  const double rev = revenue(inst, mech);

  write_file(out_path(cfg.out, "mechanism.csv"), mechanism_csv(mech));
  write_file(out_path(cfg.out, "mechanism.json"), to_json(mech).dump(2) + "\n");
  nlohmann::json summary;
  summary["t1"] = mech.t1;
  summary["t2"] = mech.t2;
  summary["revenue"] = rev;
  summary["pay_seller"] = mech.pay_seller;
  summary["grid_nodes"] = mech.size();
  summary["instance"] = to_json(inst);
  write_file(out_path(cfg.out, "summary.json"), summary.dump(2) + "\n");

  std::cout << "t1=" << fmt17(mech.t1) << " t2=" << fmt17(mech.t2)
            << " revenue=" << fmt17(rev) << '\n';
  return kOk;
}

int cmd_verify(const Cfg& cfg) {
  const ProblemInstance inst = load_instance(cfg.instance_path);
  ThresholdMechanism mech = cfg.mechanism_path.empty()
                                ? solve_instance(cfg, inst)
                                : load_mechanism(cfg.mechanism_path);
  VerifyOptions vopt;
  vopt.t_points = cfg.grid_t;
  vopt.q_points = cfg.grid_q;
  vopt.tolerance = cfg.tol;
  const VerificationReport report = certify(inst, mech, vopt);
  write_file(out_path(cfg.out, "verification.json"),
             to_json(report).dump(2) + "\n");
  std::cout << format_report_table(report);
  return report.feasible ? kOk : kInfeasible;
}

int cmd_oracle_compare(const Cfg& cfg) {
  const ProblemInstance inst = load_instance(cfg.instance_path);
  const ThresholdMechanism mech = solve_instance(cfg, inst);
  std::vector<std::size_t> sizes;
  for (double v : parse_values(cfg.grids)) {
    if (v < 1.0) throw input_error("grid sizes must be at least 1");
    sizes.push_back(static_cast<std::size_t>(v));
  }
  if (sizes.empty()) throw input_error("no grid sizes given");
  EnumerateOptions eopt;
  eopt.max_candidates = cfg.max_candidates;
  const auto rows = compare(inst, mech, sizes, eopt);
  write_file(out_path(cfg.out, "comparison.csv"), comparison_csv(rows));
  for (const auto& r : rows)
    std::cout << "grid=" << r.grid_size << " discrete_opt="
              << fmt17(r.discrete_opt) << " closed_form=" << fmt17(r.closed_form)
              << " gap=" << fmt17(r.gap)
              << (r.enumerated
                      ? (r.vectors_match ? " [enumerated, vectors match]"
                                         : " [enumerated, vectors DIFFER]")
                      : " [pointwise rule]")
              << '\n';
  return kOk;
}

int cmd_simulate(const Cfg& cfg) {
  const ProblemInstance inst = load_instance(cfg.instance_path);
  const ThresholdMechanism mech = solve_instance(cfg, inst);
  const SimulationResult res = run(inst, mech, cfg.n_runs, cfg.seed,
                                   cfg.n_buckets);
  const double rev = revenue(inst, mech);
  nlohmann::json j = to_json(res);
  j["quadrature_revenue"] = rev;
  write_file(out_path(cfg.out, "simulation.json"), j.dump(2) + "\n");
  write_file(out_path(cfg.out, "utility_buckets.csv"),
             buckets_csv(res.buyer_utility_buckets));
  std::cout << "runs=" << res.n_runs << " mean_revenue="
            << fmt17(res.mean_revenue) << " se=" << fmt17(res.se_revenue)
            << " quadrature=" << fmt17(rev)
            << " trade_rate=" << fmt17(res.trade_rate) << '\n';
  return kOk;
}

int cmd_sweep(const Cfg& cfg) {
  const ProblemInstance base = load_instance(cfg.instance_path);
  std::vector<double> values;
  if (!cfg.sweep_values.empty()) {
    values = parse_values(cfg.sweep_values);
  } else if (cfg.sweep_steps > 0) {
    for (int i = 0; i < cfg.sweep_steps; ++i)
      values.push_back(cfg.sweep_from +
                       (cfg.sweep_to - cfg.sweep_from) *
                           (cfg.sweep_steps == 1
                                ? 0.0
                                : static_cast<double>(i) /
                                      static_cast<double>(cfg.sweep_steps - 1)));
  }
  if (values.empty()) throw input_error("sweep: empty value range");

  if (cfg.sweep_param == "oracle-grid") {
    const ThresholdMechanism mech = solve_instance(cfg, base);
    std::vector<std::size_t> sizes;
    for (double v : values) sizes.push_back(static_cast<std::size_t>(v));
    EnumerateOptions eopt;
    eopt.max_candidates = cfg.max_candidates;
    const auto rows = compare(base, mech, sizes, eopt);
    write_file(out_path(cfg.out, "sweep.csv"), comparison_csv(rows));
    std::cout << "wrote " << rows.size() << " rows\n";
    return kOk;
  }
  if (cfg.sweep_param != "reserve" && cfg.sweep_param != "r")
    throw input_error("sweep: unknown parameter '" + cfg.sweep_param +
                      "' (use 'reserve' or 'oracle-grid')");

  std::ostringstream os;
  os << "r,t1,t2,revenue,feasible,worst_violation,status\n";
  for (double r : values) {
    ProblemInstance inst = base;
    inst.reserve = r;
    os << fmt17(r) << ',';
    try {
      const ThresholdMechanism mech = solve_instance(cfg, inst);
      VerifyOptions vopt;
      vopt.t_points = cfg.grid_t;
      vopt.q_points = cfg.grid_q;
      vopt.tolerance = cfg.tol;
      const VerificationReport report = certify(inst, mech, vopt);
      double worst = 0.0;
      for (const auto& c : report.constraints)
        worst = std::max(worst, c.worst_violation);
      os << fmt17(mech.t1) << ',' << fmt17(mech.t2) << ','
         << fmt17(revenue(inst, mech)) << ','
         << (report.feasible ? "true" : "false") << ',' << fmt17(worst)
         << ",ok\n";
    } catch (const assumption_error&) {
      os << ",,,,," << "assumption_failed\n";
    }
  }
  write_file(out_path(cfg.out, "sweep.csv"), os.str());
  std::cout << "wrote " << values.size() << " rows\n";
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{
      "medtrade: optimal mediation mechanisms for bilateral trade\n"
      "(solver, feasibility verifier, brute-force oracle, simulator)"};
  app.require_subcommand(1);
  Cfg cfg;

  auto add_common = [&](CLI::App* sub, bool needs_instance = true) {
    auto* opt = sub->add_option("--instance", cfg.instance_path,
                                "instance JSON file");
    if (needs_instance) opt->required();
    sub->add_option("--out", cfg.out, "output directory (default .)");
    sub->add_option("--solver-grid", cfg.solver_grid,
                    "base solver grid size over T (default 2049)");
  };

  auto* s_solve = app.add_subcommand(
      "solve", "compute the optimal threshold mechanism; writes "
               "mechanism.csv/mechanism.json/summary.json");
  add_common(s_solve);

  auto* s_verify = app.add_subcommand(
      "verify", "certify feasibility of all original constraints on grids; "
                "exit 0 iff feasible");
  add_common(s_verify);
  s_verify->add_option("--mechanism", cfg.mechanism_path,
                       "mechanism JSON (default: solve inline)");
  s_verify->add_option("--grid-t", cfg.grid_t, "t grid points (default 201)");
  s_verify->add_option("--grid-q", cfg.grid_q, "q grid points (default 201)");
  s_verify->add_option("--tol", cfg.tol, "feasibility tolerance (default 1e-7)");

  auto* s_oracle = app.add_subcommand(
      "oracle-compare",
      "brute-force discrete optimality certificate across grid sizes "
      "(worker count via MEDTRADE_WORKERS)");
  add_common(s_oracle);
  s_oracle->add_option("--grids", cfg.grids,
                       "comma-separated grid sizes (default 8,12,16,32)");
  s_oracle->add_option("--max-candidates", cfg.max_candidates,
                       "enumeration bound (default 3000000)");

  auto* s_sim = app.add_subcommand(
      "simulate", "Monte Carlo protocol execution against quadrature");
  add_common(s_sim);
  s_sim->add_option("-n,--runs", cfg.n_runs, "number of runs (default 1e6)");
  s_sim->add_option("--seed", cfg.seed, "RNG seed");
  s_sim->add_option("--buckets", cfg.n_buckets,
                    "buyer-utility buckets (default 20)");

  auto* s_sweep = app.add_subcommand("sweep",
                                     "parameter study; one row per value");
  add_common(s_sweep);
  s_sweep->add_option("--param", cfg.sweep_param,
                      "'reserve' (alias 'r') or 'oracle-grid'");
  s_sweep->add_option("--values", cfg.sweep_values, "comma-separated values");
  s_sweep->add_option("--from", cfg.sweep_from, "range start");
  s_sweep->add_option("--to", cfg.sweep_to, "range end");
  s_sweep->add_option("--steps", cfg.sweep_steps, "number of range steps");
  s_sweep->add_option("--grid-t", cfg.grid_t, "verify t grid (default 101)");
  s_sweep->add_option("--grid-q", cfg.grid_q, "verify q grid (default 101)");
  s_sweep->add_option("--tol", cfg.tol, "verify tolerance");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (s_solve->parsed()) return cmd_solve(cfg);
    if (s_verify->parsed()) return cmd_verify(cfg);
    if (s_oracle->parsed()) return cmd_oracle_compare(cfg);
    if (s_sim->parsed()) return cmd_simulate(cfg);
    if (s_sweep->parsed()) {
      if (!s_sweep->count("--grid-t")) cfg.grid_t = 101;
      if (!s_sweep->count("--grid-q")) cfg.grid_q = 101;
      return cmd_sweep(cfg);
    }
  } catch (const input_error& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const assumption_error& e) {
    std::cerr << "assumption failure: " << e.what() << '\n';
    return kAssumptionError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args);
}

}  // namespace medtrade
