#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "cot/problem.hpp"

namespace cot {

enum class Family { kUniform1D, kMarginal1D, kUniform2D, kMarginal2D };

const char* to_string(Family family);
std::optional<Family> parse_family(std::string_view name);
bool is_uniform(Family family);
bool is_2d(Family family);

// Random streams used per array.
inline constexpr std::uint64_t kStreamU = 0;
inline constexpr std::uint64_t kStreamV = 1;
inline constexpr std::uint64_t kStreamNoise = 2;

struct GenSpec {
  Family family = Family::kUniform1D;
  std::size_t n = 8;       // points per axis (2D flattens to n * n cells)
  double lambda = 5.0;     // uniform capacity eta = lambda / N^2
  double delta = 0.25;     // marginal capacity eta = 2 u v^T + delta P
  std::uint64_t seed = 0;
  std::optional<double> spacing;  // h (1D) or hx = hy (2D); default 1/n
};

// i.i.d. uniform (0, 1] draws normalized to unit mass.
Marginals gen_marginals(std::size_t count, std::uint64_t seed);

CostSpec gen_cost_1d(std::size_t n, double h);
CostSpec gen_cost_2d(std::size_t n, double hx, double hy);

// theta = 0, eta = lambda / count^2 everywhere; `count` is the flattened size.
CapacityBounds gen_uniform_capacity(std::size_t count, double lambda);

// theta = 0, eta = 2 u v^T + delta P with P i.i.d. uniform (0, 1]. No dense
// storage when delta == 0.
CapacityBounds gen_marginal_capacity(const Marginals& marginals, double delta, std::uint64_t seed);

struct GeneratedInstance {
  ProblemInstance instance;
  // Uniform families redraw marginals with seed + 1, seed + 2, ... until
  // feasible; this counts the redraws.
  int retries = 0;
  std::uint64_t marginal_seed = 0;
};

inline constexpr int kMaxGenerationRetries = 100;

// Throws Error(kInfeasible) when no feasible draw is found within
// kMaxGenerationRetries redraws.
GeneratedInstance generate(const GenSpec& spec);

}  // namespace cot
