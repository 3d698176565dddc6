#include "cot/cli/app.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <fstream>
#include <ostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "cot/cli/bench.hpp"
#include "cot/cli/trace_plot.hpp"
#include "cot/error.hpp"

namespace cot::cli {

namespace {

void add_instance_flags(CLI::App& cmd, InstanceArgs& args) {
  cmd.add_option("--family", args.family, "uniform1d | marginal1d | uniform2d | marginal2d")
      ->capture_default_str();
  cmd.add_option("--size", args.size, "Points per axis")->capture_default_str()->check(CLI::PositiveNumber);
  cmd.add_option("--lambda", args.lambda, "Uniform capacity scale (eta = lambda / N^2)")->capture_default_str();
  cmd.add_option("--delta", args.delta, "Noise scale of the marginal capacity")->capture_default_str();
  cmd.add_option("--seed", args.seed, "Generator seed")->capture_default_str();
}

void add_solver_flags(CLI::App& cmd, SolverFlags& flags) {
  cmd.add_option("--outer-tol", flags.outer_tol, "Relative outer change to stop at")->capture_default_str();
  cmd.add_option("--newton-tol", flags.newton_tol, "Newton relative step tolerance")->capture_default_str();
  cmd.add_option("--maxiter", flags.maxiter, "Outer iteration cap")->capture_default_str();
  cmd.add_option("--stabilize", flags.stabilize, "Log-domain stabilization for DRM (true/false)")
      ->capture_default_str();
  cmd.add_option("--time-budget", flags.time_budget_s, "Seconds per solve")->capture_default_str();
  cmd.add_option("--lp-cap", flags.lp_cap, "Largest N*M handed to the LP oracle")->capture_default_str();
  cmd.add_option("--ibp-stop", flags.ibp_stop, "IBP plan-change measure: l1 | entrywise")
      ->check(CLI::IsMember({"l1", "entrywise"}))
      ->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Capacity-constrained optimal transport solvers and benchmarks", "cotbench"};
  app.require_subcommand(1);

  SolveArgs solve;
  CLI::App* solve_cmd = app.add_subcommand("solve", "Solve one instance and print a JSON report");
  add_instance_flags(*solve_cmd, solve.instance);
  add_solver_flags(*solve_cmd, solve.flags);
  solve_cmd->add_option("--instance", solve.instance.instance_path, "Instance JSON file");
  solve_cmd->add_option("--solver", solve.solver, "drm | ibp | lp")->capture_default_str();
  solve_cmd->add_option("--epsilon", solve.flags.epsilon, "Regularization strength")->capture_default_str();
  solve_cmd->add_option("--trace", solve.trace_path, "Write JSON-lines iteration trace here");
  solve_cmd->add_option("--out", solve.out_path, "Output file (default stdout)");
  solve_cmd->add_option("--format", solve.format, "json | csv")->capture_default_str();
  solve_cmd->add_flag("--emit-plan", solve.emit_plan, "Include the plan in the report");
  solve_cmd->add_option("--oracle", solve.oracle, "Compute the LP oracle when within --lp-cap")
      ->capture_default_str();

  BenchOptions bench;
  InstanceArgs bench_instance;
  std::vector<std::string> bench_solvers{"drm", "ibp", "lp"};
  std::string bench_out, bench_format = "csv";
  std::optional<double> bench_lambda, bench_delta;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Run the comparison table and print CSV");
  add_solver_flags(*bench_cmd, bench.flags);
  bench_cmd->add_option("--family", bench_instance.family, "Experiment family")->capture_default_str();
  bench_cmd->add_option("--size", bench.sizes, "Sizes, comma separated")->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--lambda", bench_lambda, "Uniform capacity scale (default 5)");
  bench_cmd->add_option("--delta", bench_delta, "Marginal capacity noise (default 0.25)");
  bench_cmd->add_option("--epsilon", bench.epsilons, "Epsilons, comma separated")
      ->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--solver", bench_solvers, "Solvers, comma separated")->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--trials", bench.trials, "Instances per cell")->capture_default_str();
  bench_cmd->add_option("--seed", bench.seed, "Base seed; trial t uses seed + t")->capture_default_str();
  bench_cmd->add_option("--out", bench_out, "Output file (default stdout)");
  bench_cmd->add_option("--format", bench_format, "csv | json")->capture_default_str();
  bench_cmd->add_flag("--deterministic-times", bench.deterministic_times,
                      "Report iteration counts instead of seconds");

  std::string trace_in, trace_out;
  CLI::App* plot_cmd = app.add_subcommand("trace-plot", "Turn a solve trace into error-vs-time CSV");
  plot_cmd->add_option("trace", trace_in, "Trace file written by solve --trace")->required();
  plot_cmd->add_option("--out", trace_out, "Output file (default stdout)");

  InstanceArgs gen;
  std::string gen_out;
  CLI::App* gen_cmd = app.add_subcommand("gen", "Generate an instance and print it as JSON");
  add_instance_flags(*gen_cmd, gen);
  gen_cmd->add_option("--out", gen_out, "Output file (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitUsage;
  }

  try {
    if (solve_cmd->parsed()) return cmd_solve(solve, out, err);
    if (gen_cmd->parsed()) return cmd_gen(gen, gen_out, out, err);
    if (plot_cmd->parsed()) {
      std::ifstream in(trace_in);
      if (!in) throw Error(ErrorCode::kParse, "cannot open trace '" + trace_in + "'");
      emit(trace_plot_csv(in), trace_out, out);
      return kExitOk;
    }
    if (bench_cmd->parsed()) {
      bench.family = family_or_throw(bench_instance.family);
      bench.param = is_uniform(bench.family) ? bench_lambda.value_or(5.0) : bench_delta.value_or(0.25);
      bench.solvers.clear();
      for (const std::string& name : bench_solvers) {
        const std::optional<SolverKind> kind = parse_solver(name);
        if (!kind) throw Error(ErrorCode::kInvalidArgument, "unknown solver '" + name + "'");
        bench.solvers.push_back(*kind);
      }
      if (bench.epsilons.empty() || bench.sizes.empty()) {
        throw Error(ErrorCode::kInvalidArgument, "need at least one size and one epsilon");
      }
      if (bench_format != "csv" && bench_format != "json") {
        throw Error(ErrorCode::kInvalidArgument, "unknown format '" + bench_format + "'");
      }
      const std::vector<BenchRow> rows = run_bench(bench);
      emit(bench_format == "csv" ? bench_csv(rows) : bench_json(rows), bench_out, out);
      return kExitOk;
    }
  } catch (const Error& e) {
    fmt::print(err, "error [{}]: {}\n", to_string(e.code()), e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitSolverFailure;
  }
  return kExitUsage;
}

}  // namespace cot::cli
