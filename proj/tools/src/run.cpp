#include "cot/cli/run.hpp"

#include "cot/drm.hpp"
#include "cot/error.hpp"
#include "cot/ibp.hpp"
#include "cot/transport.hpp"

namespace cot::cli {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kParse:
    case ErrorCode::kDimensionMismatch:
      return kExitUsage;
    case ErrorCode::kInfeasible:
    case ErrorCode::kDegenerate:
      return kExitInfeasible;
    case ErrorCode::kSizeCap:
      return kExitSizeCap;
    case ErrorCode::kTimeBudget:
      return kExitNotConverged;
    default:
      return kExitSolverFailure;
  }
}

const char* to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::kDrm:
      return "drm";
    case SolverKind::kIbp:
      return "ibp";
    case SolverKind::kLp:
      return "lp";
  }
  return "?";
}

std::optional<SolverKind> parse_solver(std::string_view name) {
  if (name == "drm") return SolverKind::kDrm;
  if (name == "ibp") return SolverKind::kIbp;
  if (name == "lp") return SolverKind::kLp;
  return std::nullopt;
}

SolveOutcome run_solver(SolverKind kind, const ProblemInstance& instance, const SolverFlags& flags,
                        const TraceSink& trace) {
  SolveOutcome out;
  out.solver = kind;
  switch (kind) {
    case SolverKind::kDrm: {
      DrmConfig config;
      config.epsilon = flags.epsilon;
      config.outer_tol = flags.outer_tol;
      config.newton_tol = flags.newton_tol;
      config.max_outer_iters = flags.maxiter;
      config.stabilization_enabled = flags.stabilize;
      config.time_budget_s = flags.time_budget_s;
      config.threads = 0;
      DrmResult r = drm_solve(instance, config, trace);
      out.plan = std::move(r.plan);
      out.report = std::move(r.report);
      break;
    }
    case SolverKind::kIbp: {
      IbpConfig config;
      config.epsilon = flags.epsilon;
      config.outer_tol = flags.outer_tol;
      config.max_iters = flags.maxiter;
      config.time_budget_s = flags.time_budget_s;
      if (flags.ibp_stop == "entrywise") {
        config.stop_measure = IbpStopMeasure::kEntrywiseMax;
      } else if (flags.ibp_stop != "l1") {
        throw Error(ErrorCode::kInvalidArgument, "unknown IBP stop measure '" + flags.ibp_stop + "'");
      }
      IbpResult r = ibp_solve(instance, config, trace);
      out.plan = std::move(r.plan);
      out.report = std::move(r.report);
      break;
    }
    case SolverKind::kLp: {
      LpOptions options;
      options.max_variables = flags.lp_cap;
      options.time_budget_s = flags.time_budget_s;
      LpSolution lp = lp_solve_exact(instance, options);
      if (lp.status == LpStatus::kInfeasible) throw Error(ErrorCode::kInfeasible, lp.message);
      out.plan = lp.plan;
      out.objective = lp.objective;
      out.converged = lp.status == LpStatus::kOptimal;
      out.timed_out = lp.status == LpStatus::kIterationLimit && lp.wall_time_s > flags.time_budget_s;
      out.iterations = lp.pivots;
      out.wall_time_s = lp.wall_time_s;
      const MarginalResiduals res = marginal_residuals(lp.plan, instance.marginals());
      out.report.final_row_residual = res.row;
      out.report.final_col_residual = res.col;
      out.report.converged = out.converged;
      out.report.wall_time_s = lp.wall_time_s;
      out.report.outer_iters = lp.pivots;
      out.report.stop_reason = out.timed_out ? StopReason::kTimeBudget : StopReason::kTolerance;
      if (trace) {
        TraceRecord record;
        record.iteration = lp.pivots;
        record.time_s = lp.wall_time_s;
        record.row_residual = res.row;
        record.col_residual = res.col;
        record.objective = lp.objective;
        trace(record);
      }
      out.lp = std::move(lp);
      return out;
    }
  }
  out.objective = objective(instance.cost(), out.plan);
  out.converged = out.report.converged;
  out.timed_out = out.report.stop_reason == StopReason::kTimeBudget;
  out.iterations = out.report.outer_iters;
  out.wall_time_s = out.report.wall_time_s;
  return out;
}

std::optional<LpSolution> oracle_for(const ProblemInstance& instance, const SolverFlags& flags) {
  const double variables = static_cast<double>(instance.n()) * static_cast<double>(instance.m());
  if (variables > static_cast<double>(flags.lp_cap)) return std::nullopt;
  LpOptions options;
  options.max_variables = flags.lp_cap;
  options.time_budget_s = flags.time_budget_s;
  LpSolution lp = lp_solve_exact(instance, options);
  if (lp.status != LpStatus::kOptimal) return std::nullopt;
  return lp;
}

}  // namespace cot::cli
