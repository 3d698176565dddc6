#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "cot/cli/run.hpp"
#include "cot/generate.hpp"

namespace cot::cli {

struct InstanceArgs {
  std::string instance_path;  // takes precedence over the generator flags
  std::string family = "uniform1d";
  std::size_t size = 8;
  double lambda = 5.0;
  double delta = 0.25;
  std::uint64_t seed = 0;
};

struct SolveArgs {
  InstanceArgs instance;
  std::string solver = "drm";
  SolverFlags flags;
  std::string trace_path;
  std::string out_path;
  std::string format = "json";
  bool emit_plan = false;
  bool oracle = true;
};

// Loads or generates the instance; throws cot::Error.
ProblemInstance obtain_instance(const InstanceArgs& args, std::ostream& err);
Family family_or_throw(const std::string& name);

// Writes to `path`, or to `out` when the path is empty. Throws Error(kParse)
// when the file cannot be opened.
void emit(const std::string& text, const std::string& path, std::ostream& out);

int cmd_solve(const SolveArgs& args, std::ostream& out, std::ostream& err);
int cmd_gen(const InstanceArgs& args, const std::string& out_path, std::ostream& out, std::ostream& err);

}  // namespace cot::cli
