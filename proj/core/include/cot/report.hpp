#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace cot {

enum class StopReason {
  kTolerance,      // outer relative change fell below outer_tol
  kMaxIterations,  // iteration cap reached first
  kTimeBudget,     // wall-clock budget exhausted
};

const char* to_string(StopReason reason);

struct SolveReport {
  std::size_t outer_iters = 0;
  bool converged = false;
  StopReason stop_reason = StopReason::kMaxIterations;
  std::vector<double> outer_residual_history;
  std::size_t total_newton_iters = 0;
  std::size_t stabilizations = 0;
  double wall_time_s = 0.0;
  double final_row_residual = 0.0;
  double final_col_residual = 0.0;
  // Peak number of doubles held by the solver's iteration state (duals,
  // offsets, scratch, or plan matrices). The memory comparison reports this.
  std::size_t state_scalars = 0;
};

// One per outer iteration when tracing is on. The objective is <C, gamma>
// of the current iterate, in the coordinates of the caller's instance.
struct TraceRecord {
  std::size_t iteration = 0;
  double time_s = 0.0;
  double delta_outer = 0.0;
  double row_residual = 0.0;
  double col_residual = 0.0;
  double objective = 0.0;
};

using TraceSink = std::function<void(const TraceRecord&)>;

// JSON-lines encoding shared by all solvers:
// {"type":"iter","iteration":..,"time_s":..,"delta_outer":..,"row_res":..,"col_res":..,"objective":..}
std::string trace_record_to_json(const TraceRecord& record);

inline constexpr double kNoTimeBudget = std::numeric_limits<double>::infinity();

}  // namespace cot
