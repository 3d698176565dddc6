#include "cot/generate.hpp"

#include <numeric>

#include "cot/error.hpp"
#include "cot/rng.hpp"
#include "cot/transport.hpp"

namespace cot {

const char* to_string(Family family) {
  switch (family) {
    case Family::kUniform1D: return "uniform1d";
    case Family::kMarginal1D: return "marginal1d";
    case Family::kUniform2D: return "uniform2d";
    case Family::kMarginal2D: return "marginal2d";
  }
  return "unknown";
}

std::optional<Family> parse_family(std::string_view name) {
  for (Family f : {Family::kUniform1D, Family::kMarginal1D, Family::kUniform2D, Family::kMarginal2D}) {
    if (name == to_string(f)) return f;
  }
  return std::nullopt;
}

bool is_uniform(Family family) { return family == Family::kUniform1D || family == Family::kUniform2D; }
bool is_2d(Family family) { return family == Family::kUniform2D || family == Family::kMarginal2D; }

namespace {

std::vector<double> normalized_draws(std::size_t count, const CounterRng& rng) {
  std::vector<double> x(count);
  for (std::size_t k = 0; k < count; ++k) x[k] = rng.uniform(k);
  const double total = std::accumulate(x.begin(), x.end(), 0.0);
  for (double& value : x) value /= total;
  return x;
}

}  // namespace

Marginals gen_marginals(std::size_t count, std::uint64_t seed) {
  if (count == 0) throw Error(ErrorCode::kInvalidArgument, "marginals need at least one point");
  return Marginals{normalized_draws(count, CounterRng(seed, kStreamU)),
                   normalized_draws(count, CounterRng(seed, kStreamV))};
}

CostSpec gen_cost_1d(std::size_t n, double h) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "grid needs at least one point");
  return CostSpec::grid_1d(h);
}

CostSpec gen_cost_2d(std::size_t n, double hx, double hy) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "grid needs at least one point");
  return CostSpec::grid_2d(n, hx, hy);
}

CapacityBounds gen_uniform_capacity(std::size_t count, double lambda) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::kInvalidArgument, "lambda must be > 0");
  const double c = static_cast<double>(count);
  return CapacityBounds{BoundSpec::zero(), BoundSpec::uniform(lambda / (c * c))};
}

CapacityBounds gen_marginal_capacity(const Marginals& marginals, double delta, std::uint64_t seed) {
  if (!(delta >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "delta must be >= 0");
  std::optional<Matrix> noise;
  if (delta > 0.0) {
    const CounterRng rng(seed, kStreamNoise);
    Matrix p(marginals.u.size(), marginals.v.size());
    auto values = p.values();
    for (std::size_t k = 0; k < values.size(); ++k) values[k] = rng.uniform(k);
    noise = std::move(p);
  }
  return CapacityBounds{BoundSpec::zero(),
                        BoundSpec::rank_one(marginals.u, marginals.v, 2.0, delta, std::move(noise))};
}

GeneratedInstance generate(const GenSpec& spec) {
  if (spec.n == 0) throw Error(ErrorCode::kInvalidArgument, "size must be >= 1");
  const bool two_d = is_2d(spec.family);
  const std::size_t count = two_d ? spec.n * spec.n : spec.n;
  const double h = spec.spacing.value_or(1.0 / static_cast<double>(spec.n));
  CostSpec cost = two_d ? gen_cost_2d(spec.n, h, h) : gen_cost_1d(spec.n, h);

  if (!is_uniform(spec.family)) {
    Marginals marginals = gen_marginals(count, spec.seed);
    CapacityBounds bounds = gen_marginal_capacity(marginals, spec.delta, spec.seed);
    return GeneratedInstance{ProblemInstance(std::move(cost), std::move(marginals), std::move(bounds)), 0,
                             spec.seed};
  }

  const CapacityBounds bounds = gen_uniform_capacity(count, spec.lambda);
  for (int retry = 0; retry <= kMaxGenerationRetries; ++retry) {
    const std::uint64_t seed = spec.seed + static_cast<std::uint64_t>(retry);
    ProblemInstance candidate(cost, gen_marginals(count, seed), bounds);
    if (validate_feasibility(candidate).ok()) {
      return GeneratedInstance{std::move(candidate), retry, seed};
    }
  }
  throw Error(ErrorCode::kInfeasible,
              "no feasible marginals after " + std::to_string(kMaxGenerationRetries) +
                  " redraws; lambda is too small for this size");
}

}  // namespace cot
