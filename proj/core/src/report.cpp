#include "cot/report.hpp"

#include <json.hpp>

namespace cot {

const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::kTolerance: return "tolerance";
    case StopReason::kMaxIterations: return "max_iterations";
    case StopReason::kTimeBudget: return "time_budget";
  }
  return "unknown";
}

std::string trace_record_to_json(const TraceRecord& r) {
  nlohmann::json j{{"type", "iter"},          {"iteration", r.iteration}, {"time_s", r.time_s},
                   {"delta_outer", r.delta_outer}, {"row_res", r.row_residual}, {"col_res", r.col_residual},
                   {"objective", r.objective}};
  return j.dump();
}

}  // namespace cot
