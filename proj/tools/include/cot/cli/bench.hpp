#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cot/cli/run.hpp"
#include "cot/generate.hpp"

namespace cot::cli {

struct BenchOptions {
  Family family = Family::kUniform1D;
  std::vector<std::size_t> sizes{8};
  // lambda for uniform families, delta for marginal ones.
  double param = 5.0;
  std::vector<double> epsilons{1e-3};
  std::vector<SolverKind> solvers{SolverKind::kDrm, SolverKind::kIbp, SolverKind::kLp};
  std::size_t trials = 5;
  std::uint64_t seed = 0;
  SolverFlags flags;
  // Report mean iteration counts (pivots for the LP) instead of seconds.
  bool deterministic_times = false;
};

// A table cell that is either a number, "N/A" (not available, e.g. no
// oracle above the LP cap) or "-" (every trial failed or hit the budget).
struct Cell {
  enum class State { kValue, kNotAvailable, kFailed };
  State state = State::kFailed;
  double value = 0.0;

  static Cell of(double v) { return {State::kValue, v}; }
  static Cell not_available() { return {State::kNotAvailable, 0.0}; }
  static Cell failed() { return {State::kFailed, 0.0}; }
  std::string text() const;
};

struct BenchRow {
  std::string family;
  double param = 0.0;
  std::size_t size = 0;
  std::string solver;
  double epsilon = 0.0;
  Cell time_s;
  Cell rel_err;
  Cell speedup;
  double converged_frac = 0.0;
  std::size_t trials = 0;
};

inline constexpr const char* kBenchColumns =
    "family,param,size,solver,epsilon,time_s,rel_err,speedup,converged_frac,trials";

// One row per (size, solver, epsilon). Trial t uses seed + t. Failures are
// recorded in the cells, never thrown.
std::vector<BenchRow> run_bench(const BenchOptions& options);

std::string bench_csv(const std::vector<BenchRow>& rows);
std::string bench_json(const std::vector<BenchRow>& rows);

}  // namespace cot::cli
