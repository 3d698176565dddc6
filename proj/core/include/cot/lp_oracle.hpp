#pragma once

#include <cstddef>
#include <string>

#include "cot/problem.hpp"
#include "cot/report.hpp"

namespace cot {

enum class LpStatus { kOptimal, kInfeasible, kIterationLimit };

const char* to_string(LpStatus status);

struct LpOptions {
  // Largest N * M accepted.
  std::size_t max_variables = 10000;
  std::size_t max_pivots = 50'000'000;
  double time_budget_s = kNoTimeBudget;
};

struct LpSolution {
  TransportPlan plan;
  double objective = 0.0;
  LpStatus status = LpStatus::kIterationLimit;
  // |primal - dual| of the final basis; certified when <= 1e-9 max(1, |primal|).
  double duality_gap = 0.0;
  std::size_t pivots = 0;
  // For kInfeasible: which constraint could not be met.
  std::string message;
  double wall_time_s = 0.0;
};

// Exact solve of min <C, gamma> over theta <= gamma <= eta with both
// marginals, as a capacitated min-cost flow on the complete bipartite graph
// (primal network simplex with a strongly feasible basis, deterministic block
// pricing). Lower bounds are handled natively. Throws kSizeCap above
// max_variables and kDimensionMismatch on malformed input. A time-budget hit
// returns kIterationLimit.
LpSolution lp_solve_exact(const ProblemInstance& instance, const LpOptions& options = {});

struct RelativeError {
  double value = 0.0;
  // True when the oracle objective is zero and value is the absolute gap.
  bool absolute = false;
};

// |<C, gamma> - <C, gamma*>| / |<C, gamma*>|. Throws kInvalidArgument unless
// the oracle is optimal.
RelativeError relative_error(const TransportPlan& candidate, const ProblemInstance& instance,
                             const LpSolution& oracle);

// ||gamma - gamma*||_F / ||gamma*||_F (absolute when the oracle plan is zero).
double plan_gap(const TransportPlan& candidate, const LpSolution& oracle);

}  // namespace cot
