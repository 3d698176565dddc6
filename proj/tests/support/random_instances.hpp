#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "cot/problem.hpp"

namespace cot::testing {

inline std::vector<double> random_simplex(std::size_t count, std::mt19937_64& rng, double floor = 0.05) {
  std::uniform_real_distribution<double> draw(floor, 1.0);
  std::vector<double> x(count);
  double total = 0.0;
  for (double& value : x) {
    value = draw(rng);
    total += value;
  }
  for (double& value : x) value /= total;
  return x;
}

inline Matrix random_matrix(std::size_t n, std::size_t m, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> draw(lo, hi);
  Matrix out(n, m);
  for (double& value : out.values()) value = draw(rng);
  return out;
}

// Dense instance with theta = 0 and eta_ij = u_i v_j (1 + slack_ij), slack in
// [slack_lo, slack_hi]; u v^T is strictly inside whenever slack_lo > 0.
inline ProblemInstance random_upper_instance(std::size_t n, std::size_t m, std::mt19937_64& rng,
                                             double slack_lo = 0.2, double slack_hi = 1.0) {
  Marginals marg{random_simplex(n, rng), random_simplex(m, rng)};
  Matrix eta = random_matrix(n, m, rng, slack_lo, slack_hi);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) eta(i, j) = marg.u[i] * marg.v[j] * (1.0 + eta(i, j));
  }
  return ProblemInstance(CostSpec::dense(random_matrix(n, m, rng, 0.0, 1.0)), std::move(marg),
                         CapacityBounds{BoundSpec::zero(), BoundSpec::dense(std::move(eta))});
}

// Dense instance with theta_ij = u_i v_j r_ij (r in [0, 0.5]) and
// eta_ij = u_i v_j (1.2 + r'_ij), so u v^T is feasible.
inline ProblemInstance random_box_instance(std::size_t n, std::size_t m, std::mt19937_64& rng) {
  Marginals marg{random_simplex(n, rng), random_simplex(m, rng)};
  Matrix theta = random_matrix(n, m, rng, 0.0, 0.5);
  Matrix eta = random_matrix(n, m, rng, 1.2, 2.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      theta(i, j) *= marg.u[i] * marg.v[j];
      eta(i, j) *= marg.u[i] * marg.v[j];
    }
  }
  return ProblemInstance(CostSpec::dense(random_matrix(n, m, rng, 0.0, 1.0)), std::move(marg),
                         CapacityBounds{BoundSpec::dense(std::move(theta)), BoundSpec::dense(std::move(eta))});
}

}  // namespace cot::testing
