#include "cot/cli/trace_plot.hpp"

#include <fmt/format.h>

#include <cmath>
#include <istream>
#include <optional>

#include "cot/error.hpp"
#include "json.hpp"

namespace cot::cli {

std::string trace_plot_csv(std::istream& trace) {
  std::string out = "iteration,time_s,rel_err\n";
  std::optional<double> oracle;
  bool header_seen = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(trace, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParse, fmt::format("trace line {}: {}", line_no, e.what()));
    }
    const std::string type = record.value("type", "");
    if (type == "header") {
      header_seen = true;
      const auto& value = record["oracle_objective"];
      if (value.is_number()) oracle = value.get<double>();
      continue;
    }
    if (type != "iter") throw Error(ErrorCode::kParse, fmt::format("trace line {}: unknown record type", line_no));
    if (!header_seen || !oracle) {
      throw Error(ErrorCode::kInvalidArgument,
                  "trace has no oracle objective; re-run solve with the oracle enabled");
    }
    try {
      const double objective = record.at("objective").get<double>();
      const double gap = std::abs(objective - *oracle);
      const double err = *oracle == 0.0 ? gap : gap / std::abs(*oracle);
      out += fmt::format("{},{:.17g},{:.17g}\n", record.at("iteration").get<std::size_t>(),
                         record.at("time_s").get<double>(), err);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParse, fmt::format("trace line {}: {}", line_no, e.what()));
    }
  }
  return out;
}

}  // namespace cot::cli
