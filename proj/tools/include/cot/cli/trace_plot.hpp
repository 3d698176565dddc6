#pragma once

#include <iosfwd>
#include <string>

namespace cot::cli {

// Converts a JSON-lines solver trace into "iteration,time_s,rel_err" CSV.
// The header record must carry a numeric oracle_objective whenever iteration
// records are present; an empty trace gives the header line only. Throws
// Error(kParse) on malformed input and Error(kInvalidArgument) when the
// oracle objective is missing.
std::string trace_plot_csv(std::istream& trace);

}  // namespace cot::cli
