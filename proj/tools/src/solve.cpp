#include <fmt/format.h>
#include <fmt/ostream.h>

#include <fstream>
#include <optional>
#include <ostream>

#include "commands.hpp"
#include "cot/error.hpp"
#include "cot/instance_io.hpp"
#include "cot/transport.hpp"
#include "json.hpp"

namespace cot::cli {

Family family_or_throw(const std::string& name) {
  const std::optional<Family> family = parse_family(name);
  if (!family) {
    throw Error(ErrorCode::kInvalidArgument,
                "unknown family '" + name + "' (expected uniform1d, marginal1d, uniform2d or marginal2d)");
  }
  return *family;
}

ProblemInstance obtain_instance(const InstanceArgs& args, std::ostream& err) {
  if (!args.instance_path.empty()) return load_instance(args.instance_path);
  GenSpec spec;
  spec.family = family_or_throw(args.family);
  spec.n = args.size;
  spec.lambda = args.lambda;
  spec.delta = args.delta;
  spec.seed = args.seed;
  GeneratedInstance generated = generate(spec);
  if (generated.retries > 0) {
    fmt::print(err, "note: marginals redrawn {} time(s); using seed {}\n", generated.retries,
               generated.marginal_seed);
  }
  return std::move(generated.instance);
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path);
  if (!file) throw Error(ErrorCode::kParse, "cannot open '" + path + "' for writing");
  file << text;
}

namespace {

nlohmann::ordered_json nullable(const std::optional<double>& x) {
  return x ? nlohmann::ordered_json(*x) : nlohmann::ordered_json(nullptr);
}

}  // namespace

int cmd_solve(const SolveArgs& args, std::ostream& out, std::ostream& err) {
  const std::optional<SolverKind> kind = parse_solver(args.solver);
  if (!kind) throw Error(ErrorCode::kInvalidArgument, "unknown solver '" + args.solver + "'");
  if (args.format != "json" && args.format != "csv") {
    throw Error(ErrorCode::kInvalidArgument, "unknown format '" + args.format + "'");
  }
  const ProblemInstance instance = obtain_instance(args.instance, err);

  std::optional<LpSolution> oracle;
  if (args.oracle) {
    try {
      oracle = oracle_for(instance, args.flags);
    } catch (const Error&) {
      // The solver below reports the problem with its own error.
    }
  }

  std::ofstream trace_file;
  TraceSink sink;
  if (!args.trace_path.empty()) {
    trace_file.open(args.trace_path);
    if (!trace_file) throw Error(ErrorCode::kParse, "cannot open trace file '" + args.trace_path + "'");
    nlohmann::ordered_json header{{"type", "header"},
                          {"solver", to_string(*kind)},
                          {"oracle_objective",
                           nullable(oracle ? std::optional<double>(oracle->objective) : std::nullopt)}};
    trace_file << header.dump() << '\n';
    sink = [&trace_file](const TraceRecord& record) { trace_file << trace_record_to_json(record) << '\n'; };
  }

  SolveOutcome outcome;
  try {
    outcome = run_solver(*kind, instance, args.flags, sink);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kSizeCap && *kind == SolverKind::kLp) {
      throw Error(ErrorCode::kSizeCap, std::string(e.what()) + "; raise --lp-cap to allow it");
    }
    throw;
  }
  trace_file.close();

  std::optional<double> rel_err;
  bool rel_absolute = false;
  if (oracle) {
    const RelativeError re = relative_error(outcome.plan, instance, *oracle);
    rel_err = re.value;
    rel_absolute = re.absolute;
  }
  const double violation = bound_violation(outcome.plan, instance.bounds());

  std::string text;
  if (args.format == "json") {
    nlohmann::ordered_json report{
        {"solver", to_string(*kind)},
        {"n", instance.n()},
        {"m", instance.m()},
        {"epsilon", args.flags.epsilon},
        {"objective", outcome.objective},
        {"converged", outcome.converged},
        {"stop_reason", to_string(outcome.report.stop_reason)},
        {"iterations", outcome.iterations},
        {"newton_iterations", outcome.report.total_newton_iters},
        {"stabilizations", outcome.report.stabilizations},
        {"wall_time_s", outcome.wall_time_s},
        {"row_residual", outcome.report.final_row_residual},
        {"col_residual", outcome.report.final_col_residual},
        {"bound_violation", violation},
        {"state_scalars", outcome.report.state_scalars},
        {"oracle_objective", nullable(oracle ? std::optional<double>(oracle->objective) : std::nullopt)},
        {"rel_err", nullable(rel_err)},
        {"rel_err_absolute", rel_absolute},
    };
    if (outcome.lp) {
      report["lp_status"] = to_string(outcome.lp->status);
      report["duality_gap"] = outcome.lp->duality_gap;
    }
    if (args.emit_plan) {
      nlohmann::ordered_json plan = nlohmann::ordered_json::array();
      for (std::size_t i = 0; i < outcome.plan.gamma.rows(); ++i) {
        const auto row = outcome.plan.gamma.row(i);
        plan.push_back(std::vector<double>(row.begin(), row.end()));
      }
      report["plan"] = std::move(plan);
    }
    text = report.dump(2) + "\n";
  } else {
    text = "solver,n,m,epsilon,objective,converged,iterations,wall_time_s,row_residual,col_residual,rel_err\n";
    text += fmt::format("{},{},{},{:g},{:.17g},{},{},{:.6g},{:.3e},{:.3e},{}\n", to_string(*kind), instance.n(),
                        instance.m(), args.flags.epsilon, outcome.objective, outcome.converged ? 1 : 0,
                        outcome.iterations, outcome.wall_time_s, outcome.report.final_row_residual,
                        outcome.report.final_col_residual, rel_err ? fmt::format("{:.17g}", *rel_err) : "N/A");
  }
  emit(text, args.out_path, out);
  if (!outcome.converged) {
    fmt::print(err, "warning: {} stopped without converging ({})\n", to_string(*kind),
               to_string(outcome.report.stop_reason));
    return kExitNotConverged;
  }
  return kExitOk;
}

int cmd_gen(const InstanceArgs& args, const std::string& out_path, std::ostream& out, std::ostream& err) {
  const ProblemInstance instance = obtain_instance(args, err);
  emit(instance_to_json(instance, 2) + "\n", out_path, out);
  return kExitOk;
}

}  // namespace cot::cli
