#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "cot/error.hpp"
#include "cot/lp_oracle.hpp"
#include "cot/problem.hpp"
#include "cot/report.hpp"

namespace cot::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitSolverFailure = 1,
  kExitUsage = 2,
  kExitInfeasible = 3,
  kExitSizeCap = 4,
  kExitNotConverged = 5,
};

int exit_code_for(ErrorCode code);

enum class SolverKind { kDrm, kIbp, kLp };

const char* to_string(SolverKind kind);
std::optional<SolverKind> parse_solver(std::string_view name);

struct SolverFlags {
  double epsilon = 1e-3;
  double outer_tol = 1e-5;
  double newton_tol = 1e-5;
  std::size_t maxiter = 100000;
  bool stabilize = true;
  double time_budget_s = 300.0;
  std::size_t lp_cap = 10000;
  // IBP stopping measure: "l1" or "entrywise".
  std::string ibp_stop = "l1";
};

// Result of one solver run in a shape common to all three solvers. For the
// LP, `iterations` counts pivots and `converged` means a certified optimum.
struct SolveOutcome {
  SolverKind solver = SolverKind::kDrm;
  TransportPlan plan;
  double objective = 0.0;
  bool converged = false;
  bool timed_out = false;
  std::size_t iterations = 0;
  double wall_time_s = 0.0;
  SolveReport report;                // DRM and IBP
  std::optional<LpSolution> lp;      // LP only
};

// Throws cot::Error on solver failure; an infeasible LP is reported as
// Error(kInfeasible) with the oracle's message.
SolveOutcome run_solver(SolverKind kind, const ProblemInstance& instance, const SolverFlags& flags,
                        const TraceSink& trace = {});

// LP oracle within the cap, or nullopt above it. Non-optimal results are
// also returned as nullopt.
std::optional<LpSolution> oracle_for(const ProblemInstance& instance, const SolverFlags& flags);

}  // namespace cot::cli
